"""Command-line entry point emitting deterministic JSON reports.

Commands
--------
``invariants2``
    Invariants of a pair of two-by-two seeds.
``invariants4``
    Invariants of a pair of four-by-four seeds.
``table1``
    Side-by-side comparison of the two families (JSON or CSV).
``verify``
    Tower identities, oracle agreements and spectral predictions.

Every numeric field is an object ``{"value": ..., "provenance": ...}``
where the provenance is ``"formula"``, ``"oracle"``,
``"both-agree(<residual>)"``, ``"disagree(<residual>)"`` or
``"asserted"``.  Exit status is 0 when every check passes, 1 when a
check fails or a formula and its oracle disagree, and 2 on usage errors.
The environment variable ``SPINLAB_THREADS`` caps the number of report
sections evaluated concurrently.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Any, Callable

import numpy as np
import scipy.linalg as sla

from . import __version__
from .algebra import (
    SubAlgebra,
    conditional_expectation,
    inclusion_matrix,
    squared_norm,
)
from .errors import (
    DegeneratePair,
    DimensionOverflow,
    EquivalentSeeds,
    OutOfParameterRange,
    RangeExceeded,
    SpinlabError,
    UsageError,
)
from .hadamard import Angle, classify_phase_ratio, hadamard2, hadamard4, parse_angle
from .invariants import (
    commuting_square_test,
    cube_angle,
    interior_exterior_angle,
    martingale_residual,
    masa_pair_entropy,
    neg_t_log_t,
    nondegenerate_test,
    pp_constant_masa_hamming,
    pp_constant_masa_oracle,
    pp_constant_tower_sequence,
    sw_angle_spectrum,
)
from .linalg import dagger, matrix_unit, random_unitary
from .spectral import (
    entropy_lower_bound_formula,
    four_by_four_summary,
    measured_spectrum,
    odd_level_inclusion,
    predicted_inclusion_and_index,
    predicted_multiplicities,
    relative_commutant_dim,
    seed_product_square,
)
from .towers import (
    Tower,
    build_grid,
    step_corner_residual,
    tower2,
    tower4,
    verify_tower,
    vertex_unitary_residual,
)

__all__ = ["main", "build_parser", "SCHEMA"]

SCHEMA = "report_v1"
DEFAULT_SEED = 20240917
AGREE_TOL = 1e-7


# ---------------------------------------------------------------------- field helpers
def _clean(x: float) -> float:
    """Round to 12 significant digits so reports are byte-stable."""
    x = float(x)
    if not math.isfinite(x):
        return x
    return float(f"{x:.12g}")


def _value(v):
    if isinstance(v, Fraction):
        return _clean(float(v))
    if isinstance(v, (float, np.floating)):
        return _clean(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (list, tuple)):
        return [_value(x) for x in v]
    return v


def formula(v, exact: Fraction | str | None = None) -> dict:
    out = {"value": _value(v), "provenance": "formula"}
    if exact is not None:
        out["exact"] = str(exact)
    return out


def oracle(v) -> dict:
    return {"value": _value(v), "provenance": "oracle"}


def asserted(v) -> dict:
    return {"value": _value(v), "provenance": "asserted"}


def agree(formula_value, oracle_value, tol: float = AGREE_TOL, exact=None) -> dict:
    """Field carrying the formula value, tagged with its distance to the oracle."""
    if isinstance(formula_value, (list, tuple)) or isinstance(oracle_value, (list, tuple)):
        f, o = list(formula_value), list(oracle_value)
        if len(f) != len(o):
            res = math.inf
        else:
            res = max((abs(float(a) - float(b)) for a, b in zip(f, o)), default=0.0)
    else:
        res = abs(float(formula_value) - float(oracle_value))
    tag = "both-agree" if res <= tol else "disagree"
    out = {"value": _value(formula_value), "provenance": f"{tag}({res:.1e})"}
    if tag == "disagree":
        out["oracle_value"] = _value(oracle_value)
    if exact is not None:
        out["exact"] = str(exact)
    return out


def check(name: str, residual: float, passed: bool, **extra) -> dict:
    out = {"name": name, "residual": _clean(residual), "passed": bool(passed)}
    out.update({k: _value(v) for k, v in extra.items()})
    return out


def _failures(node) -> int:
    """Count failed checks and formula/oracle disagreements anywhere in a report."""
    if isinstance(node, dict):
        own = 0
        if node.get("passed") is False:
            own += 1
        prov = node.get("provenance")
        if isinstance(prov, str) and prov.startswith("disagree"):
            own += 1
        return own + sum(_failures(v) for v in node.values())
    if isinstance(node, list):
        return sum(_failures(v) for v in node)
    return 0


def _threads() -> int:
    raw = os.environ.get("SPINLAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"SPINLAB_THREADS must be a positive integer, got {raw!r}")


def run_sections(sections: dict[str, Callable[[], Any]]) -> dict[str, Any]:
    """Evaluate independent report sections, concurrently when allowed."""
    workers = min(_threads(), len(sections))
    if workers <= 1:
        return {name: fn() for name, fn in sections.items()}
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {name: pool.submit(fn) for name, fn in sections.items()}
        return {name: fut.result() for name, fut in futures.items()}


def _envelope(command: str, params: dict, tolerances: dict, body: dict) -> dict:
    report = {
        "schema": SCHEMA,
        "tool_version": __version__,
        "command": command,
        "parameters": params,
        "tolerances": tolerances,
    }
    report.update(body)
    report["failures"] = _failures(body)
    return report


def _tower_checks(tower: Tower, name: str, tol: float) -> list[dict]:
    out = []
    for side, level, rep in verify_tower(tower, tol):
        out.append(
            check(
                f"{name}.{side}.level{level}",
                rep.max_residual,
                rep.passed,
                generated_dim=rep.generated_dim,
                expected_dim=rep.expected_dim,
            )
        )
    return out


# ---------------------------------------------------------------------- invariants2
def cmd_invariants2(first_angle: Angle, second_angle: Angle, levels: int = 4, tol: float = 1e-9) -> dict:
    """Report for the pair of two-by-two seeds at ``first_angle`` and ``second_angle``.

    Raises
    ------
    EquivalentSeeds
        When the seeds coincide up to monomial equivalence.
    """
    grid_levels = max(levels, 2)
    grid = build_grid("two_by_two", first_angle, second_angle, levels=grid_levels)
    u, v = grid.first[0], grid.second[0]
    diff = second_angle - first_angle
    gap = diff.radians
    cos2 = math.cos(gap) ** 2
    orthogonal = (diff.pi_multiple - Fraction(1, 2)) % 1 == 0 if diff.is_rational else abs(math.cos(gap)) < 1e-12
    floor_p = SubAlgebra.diagonal(2).conjugate(u)
    floor_q = SubAlgebra.diagonal(2).conjugate(v)
    scalars, full = SubAlgebra.scalars(2), SubAlgebra.full(2)

    def towers():
        checks = _tower_checks(grid.first, "first", tol) + _tower_checks(grid.second, "second", tol)
        res = vertex_unitary_residual(grid.first)
        checks.append(check("vertex_unitary_identity", res, res <= tol))
        return checks

    def pp_constant():
        ks = [k for k in range(grid_levels) if 2 * k + 1 <= grid_levels]
        seq = pp_constant_tower_sequence(grid.first, grid.second, ks)
        per_level = [
            {"k": lv.index, "value": agree(Fraction(1, 2), lv.value, exact=Fraction(1, 2))}
            if lv.value is not None else {"k": lv.index, "value": None, "note": lv.note}
            for lv in seq.levels
        ]
        mart = [
            check(f"martingale.level{j}", r, r <= 1e-8)
            for j in range(grid_levels - 1)
            for r in [martingale_residual(grid, j)]
        ]
        return {
            "floor": agree(0.5, pp_constant_masa_oracle(dagger(u) @ v), exact=Fraction(1, 2)),
            "per_level": per_level,
            "non_increasing": seq.non_increasing,
            "martingale": mart,
            "limit": formula(0.5, Fraction(1, 2)),
        }

    def angles():
        spectrum = sw_angle_spectrum(floor_p, floor_q)
        sw_formula = math.acos(abs(math.cos(gap)))
        basis = lambda w: [w @ (math.sqrt(2) * matrix_unit(i, i, 2)) @ dagger(w) for i in range(2)]
        mean = lambda x: np.trace(x) / 2 * np.eye(2)
        inner = interior_exterior_angle(basis(u), basis(v), mean, 2.0, 2.0)
        cube = cube_angle(floor_p, floor_q, scalars)
        cube_value = 0.0 if cube.kind == "commuting_square" else cube.coefficient
        return {
            "sano_watatani": agree([sw_formula], list(spectrum.angles)),
            "sano_watatani_operator_norm": oracle(spectrum.operator_norm),
            "cos_interior": agree(cos2, inner.cos_interior),
            "cos_exterior": formula(cos2),
            "cube_defect": {"kind": cube.kind, "coefficient": agree(cos2, cube_value)},
        }

    def entropy():
        c, s = math.cos(gap / 2) ** 2, math.sin(gap / 2) ** 2
        h_formula = neg_t_log_t(c) + neg_t_log_t(s)
        margin = -math.log(pp_constant_masa_hamming(dagger(u) @ v)) - h_formula
        out = {
            "h": agree(h_formula, masa_pair_entropy(dagger(u) @ v)),
            "H_bounds": [formula(h_formula), formula(math.log(2))],
            "h_below_minus_log_pp": check("entropy_vs_pp_constant", margin, margin >= -1e-9),
        }
        if orthogonal:
            out["H"] = formula(math.log(2))
        return out

    def commuting_square():
        ok, res = commuting_square_test(scalars, floor_p, floor_q, full)
        return {
            "formula_verdict": orthogonal,
            "oracle_verdict": ok,
            "residual": oracle(res),
            "agreement": check("commuting_square_verdict", res if ok else 0.0, ok == orthogonal),
            "nondegenerate": nondegenerate_test(floor_p, floor_q, full),
        }

    def structure():
        incl = inclusion_matrix(grid.meet[2], grid.ambient[2])
        return {
            "index": agree(4, squared_norm(incl)),
            "inclusion_matrix": incl.entries.tolist(),
            "relative_commutant_dim": agree(2, relative_commutant_dim(grid)),
        }

    body = run_sections(
        {
            "tower_verification": towers,
            "pp_constant": pp_constant,
            "angles": angles,
            "entropy": entropy,
            "commuting_square": commuting_square,
            "structure": structure,
        }
    )
    body["family"] = "two_by_two"
    params = {"alpha": first_angle.to_json(), "beta": second_angle.to_json(), "levels": levels}
    return _envelope("invariants2", params, {"structural": tol, "agreement": AGREE_TOL}, body)


# ---------------------------------------------------------------------- invariants4
def cmd_invariants4(a: Angle, b: Angle, levels: int = 3, tol: float = 1e-9) -> dict:
    """Report for the pair of four-by-four seeds at ``a`` and ``b``.

    Raises
    ------
    OutOfParameterRange, DegeneratePair, EquivalentSeeds
    """
    hadamard4(a), hadamard4(b)
    cls = classify_phase_ratio(a, b)
    grid = build_grid("four_by_four", a, b, levels=levels)
    u, v = grid.first[0], grid.second[0]
    summary = four_by_four_summary(a, b)
    prediction = predicted_inclusion_and_index(cls)
    ratio = complex(np.conj(a.unit()) * b.unit())
    re_ab = abs(ratio.real)
    floor_p = SubAlgebra.diagonal(4).conjugate(u)
    floor_q = SubAlgebra.diagonal(4).conjugate(v)
    floor_meet = grid.meet[0]
    square_formula = cls.is_even_root and cls.even_order == 4

    def classification():
        return {
            "phase_ratio_angle": str(cls.angle),
            "even_order": cls.even_order,
            "label": cls.label,
            "reading": "rational difference means even root; declared-irrational means not",
        }

    def towers():
        checks = _tower_checks(grid.first, "first", tol) + _tower_checks(grid.second, "second", tol)
        res = max(step_corner_residual(a.unit()), step_corner_residual(b.unit()))
        checks.append(check("step_corner_identity", res, res <= tol))
        return checks

    def spectra():
        rows = []
        for k in range(0, min(3, levels // 2) + 1):
            sq = seed_product_square(k, grid.first, grid.second)
            measured = measured_spectrum(k, grid.first, grid.second)
            row = {
                "k": k,
                "measured": [list(e) for e in measured.entries],
                "recursion": check(f"recursion.k{k}", sq.residual, sq.residual <= tol),
            }
            try:
                predicted = predicted_multiplicities(k, cls)
                row["predicted"] = [list(e) for e in predicted.entries]
                row["agreement"] = check(f"spectrum.k{k}", 0.0, predicted.entries == measured.entries)
            except RangeExceeded as exc:
                row["predicted"] = None
                row["note"] = str(exc)
            rows.append(row)
        return rows

    def inclusions():
        rows = []
        for k in range(0, 3):
            if 2 * k + 1 > levels:
                break
            incl = odd_level_inclusion(grid, k)
            r, c = prediction.inclusion_shape_at(k)
            rows.append({
                "k": k,
                "entries": incl.entries.tolist(),
                "squared_norm": agree(r * c, squared_norm(incl)),
            })
        return rows

    def index():
        out = {"prediction": prediction.label}
        if prediction.finite:
            out["index"] = formula(prediction.index)
            out["drop_level"] = prediction.drop_level
        else:
            out["pp_sequence_whole_over_meet"] = [
                formula(x, x) for x in prediction.pp_sequence(max(levels, 1) + 1)
            ]
        return out

    def pp_constant():
        ks = [k for k in range(levels) if 2 * k + 1 <= levels]
        seq = pp_constant_tower_sequence(grid.first, grid.second, ks)
        per_level = [
            {"k": lv.index, "value": agree(Fraction(1, 2), lv.value, exact=Fraction(1, 2))}
            if lv.value is not None else {"k": lv.index, "value": None, "note": lv.note}
            for lv in seq.levels
        ]
        mart = [
            check(f"martingale.level{j}", r, r <= 1e-8)
            for j in range(levels - 1)
            for r in [martingale_residual(grid, j)]
        ]
        return {
            "floor": agree(0.5, pp_constant_masa_oracle(dagger(u) @ v), exact=Fraction(1, 2)),
            "per_level": per_level,
            "non_increasing": seq.non_increasing,
            "martingale": mart,
            "limit": formula(summary.pp_constant, summary.pp_constant),
        }

    def angles():
        spectrum = sw_angle_spectrum(floor_p, floor_q)
        ok, res = commuting_square_test(floor_meet, floor_p, floor_q, SubAlgebra.full(4))
        cube = cube_angle(floor_p, floor_q, floor_meet)
        cube_value = 0.0 if cube.kind == "commuting_square" else cube.coefficient
        out = {
            "floor_sano_watatani": agree([math.acos(re_ab)], list(spectrum.angles)),
            "floor_commuting_square": {
                "formula_verdict": square_formula,
                "oracle_verdict": ok,
                "residual": oracle(res),
                "agreement": check("commuting_square_verdict", res if ok else 0.0, ok == square_formula),
            },
            "floor_cube_defect": {"kind": cube.kind, "coefficient": agree(re_ab**2, cube_value)},
        }
        if cls.is_even_root:
            m = cls.even_order
            out["cos_interior"] = formula(summary.cos_interior, Fraction(m - 4, 2 * (m - 2)))
            out["interior"] = formula(math.acos(summary.cos_interior))
            out["cos_exterior"] = formula(summary.cos_exterior, Fraction(1, 3))
            out["dihedral_angles"] = formula(list(summary.dihedral_angles))
            out["angle_count_table_entry"] = asserted(m // 4)
        return out

    def entropy():
        lower, upper = summary.entropy
        if cls.is_even_root:
            return {
                "H": formula(lower),
                "table": {r: {c: formula(x) for c, x in row.items()} for r, row in summary.entropy_table.items()},
            }
        return {
            "H_bounds": [
                agree(entropy_lower_bound_formula(a, b), masa_pair_entropy(dagger(u) @ v)),
                formula(upper),
            ]
        }

    def relative_commutant():
        if not square_formula:
            return {"value": None, "note": "computed at desk scale for even order 4 only"}
        if levels < 3:
            return {"value": None, "note": "needs levels >= 3"}
        return {"value": agree(1, relative_commutant_dim(grid))}

    body = run_sections(
        {
            "classification": classification,
            "tower_verification": towers,
            "spectra": spectra,
            "inclusion_matrices": inclusions,
            "index": index,
            "pp_constant": pp_constant,
            "angles": angles,
            "entropy": entropy,
            "relative_commutant_dim": relative_commutant,
        }
    )
    body["family"] = "four_by_four"
    params = {"a": a.to_json(), "b": b.to_json(), "levels": levels}
    return _envelope("invariants4", params, {"structural": tol, "agreement": AGREE_TOL}, body)


# ---------------------------------------------------------------------- table1
TABLE1_COLUMNS = ("row", "two_by_two", "two_by_two_provenance", "four_by_four", "four_by_four_provenance")


def cmd_table1() -> dict:
    """Comparison of the two families recomputed at desk scale."""
    pairs2 = [(parse_angle("0"), parse_angle("1/3")), (parse_angle("0"), parse_angle("1/5"))]
    orders = (4, 6, 8)
    pairs4 = {m: (parse_angle("0"), Angle.rational(Fraction(2, m))) for m in orders}

    def distinct():
        try:
            build_grid("two_by_two", parse_angle("0"), parse_angle("1"), levels=0, cross_check=False)
            equivalent_rejected = False
        except EquivalentSeeds:
            equivalent_rejected = True
        g2 = build_grid("two_by_two", *pairs2[0], levels=0, cross_check=False)
        g4 = [build_grid("four_by_four", *pairs4[m], levels=0, cross_check=False) for m in orders]
        two = "only when inequivalent" if equivalent_rejected and g2 else "unexpected"
        return oracle(two), oracle("always" if all(g4) else "unexpected")

    def index():
        g2 = build_grid("two_by_two", *pairs2[0], levels=2, cross_check=False)
        two = agree(4, squared_norm(inclusion_matrix(g2.meet[2], g2.ambient[2])))
        vals = []
        for m in (4, 6):
            g = build_grid("four_by_four", *pairs4[m], levels=2 * ((m - 2) // 2) + 1, cross_check=False)
            vals.append(squared_norm(odd_level_inclusion(g, (m - 2) // 2)))
        four = agree([8, 12], vals)
        four["value_set"] = "4n with integer n >= 2"
        return two, four

    def relcomm():
        g2 = build_grid("two_by_two", *pairs2[0], levels=2, cross_check=False)
        g4 = build_grid("four_by_four", *pairs4[4], levels=3, cross_check=False)
        two = agree(2, relative_commutant_dim(g2))
        four = agree(1, relative_commutant_dim(g4))
        two["reading"] = "not irreducible"
        four["reading"] = "irreducible (checked at even order 4)"
        return two, four

    def angle_count():
        counts = []
        for m in orders:
            counts.append(len(four_by_four_summary(*pairs4[m]).dihedral_angles))
        g = [len(sw_angle_spectrum(SubAlgebra.diagonal(2).conjugate(hadamard2(x).matrix),
                                   SubAlgebra.diagonal(2).conjugate(hadamard2(y).matrix)).angles) for x, y in pairs2]
        four = formula(counts)
        four["even_orders"] = list(orders)
        four["table_entry_floor_n_over_2"] = [m // 4 for m in orders]
        return oracle(g), four

    def interior():
        two = [math.acos(math.cos((y - x).radians) ** 2) for x, y in pairs2]
        four = [math.acos(four_by_four_summary(*pairs4[m]).cos_interior) for m in orders]
        t, f = formula(two), formula(four)
        t["reading"] = "depends on the pair"
        f["reading"] = "above pi/3 for every even order"
        f["even_orders"] = list(orders)
        return t, f

    def exterior():
        two = [math.acos(math.cos((y - x).radians) ** 2) for x, y in pairs2]
        four = [math.acos(four_by_four_summary(*pairs4[m]).cos_exterior) for m in orders]
        return formula(two), formula(four)

    def entropy():
        two = [masa_pair_entropy(dagger(hadamard2(x).matrix) @ hadamard2(y).matrix) for x, y in pairs2]
        four = [four_by_four_summary(*pairs4[m]).entropy[0] for m in orders]
        return oracle(two), formula(four)

    rows = run_sections(
        {
            "sides_distinct": distinct,
            "intersection_is_factor": lambda: (asserted("always"), asserted("always")),
            "index_of_intersection": index,
            "vertex_model": lambda: (asserted("yes"), asserted("no")),
            "relative_commutant": relcomm,
            "intersection_characterization": lambda: (asserted("diagonal subfactor"), asserted("unknown")),
            "angle_set_size": angle_count,
            "interior_angle": interior,
            "exterior_angle": exterior,
            "relative_entropy_h": entropy,
        }
    )
    body = {"rows": {k: {"two_by_two": v[0], "four_by_four": v[1]} for k, v in rows.items()}}
    params = {
        "two_by_two_pairs": [[x.to_json(), y.to_json()] for x, y in pairs2],
        "four_by_four_even_orders": list(orders),
    }
    return _envelope("table1", params, {"agreement": AGREE_TOL}, body)


def table1_csv(report: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TABLE1_COLUMNS)
    for name in sorted(report["rows"]):
        cells = report["rows"][name]
        row = [name]
        for fam in ("two_by_two", "four_by_four"):
            row += [json.dumps(cells[fam]["value"], sort_keys=True), cells[fam]["provenance"]]
        writer.writerow(row)
    return buf.getvalue()


# ---------------------------------------------------------------------- verify
def _perturbed(tower: Tower, eps: float, rng: np.random.Generator) -> Tower:
    """Replace ``u_1`` by the unitary part of ``u_1 + eps * G`` for a random ``G``."""
    if tower.top_level < 1 or eps == 0:
        return tower
    us = list(tower.unitaries)
    g = rng.standard_normal(us[1].shape) + 1j * rng.standard_normal(us[1].shape)
    us[1], _ = sla.polar(us[1] + eps * g)
    return Tower(tower.family, tower.seed, tuple(us))


def cmd_verify(levels: int | None = None, fuzz: float = 0.0, seed: int = DEFAULT_SEED, tol: float = 1e-9) -> dict:
    """Run the tower identities, oracle agreements and spectral checks."""
    rng = np.random.default_rng(seed)
    lev2 = 4 if levels is None else min(levels, 4)
    lev4 = 3 if levels is None else min(levels, 3)
    fuzz_rng = np.random.default_rng(seed + 1)
    t2 = _perturbed(tower2(hadamard2(parse_angle("1/3")), lev2), fuzz, fuzz_rng)
    t4 = tower4(parse_angle("1/5"), lev4)
    t4b = tower4(parse_angle("0"), lev4)
    unitaries = [random_unitary(int(n), rng) for n in rng.integers(2, 6, size=20)]
    probes = [SubAlgebra.from_structure(random_unitary(4, rng), [2, 1], [1, 2]) for _ in range(5)]

    def towers():
        return _tower_checks(t2, "two_by_two", tol) + _tower_checks(t4, "four_by_four", tol)

    def identities():
        out = []
        res = step_corner_residual(parse_angle("1/5").unit())
        out.append(check("step_corner_identity", res, res <= tol))
        if lev2 >= 2:
            res = vertex_unitary_residual(t2)
            out.append(check("vertex_unitary_identity", res, res <= tol))
        for k in range(1, lev4 // 2 + 1):
            sq = seed_product_square(k, t4b, t4)
            out.append(check(f"recursion.k{k}", sq.residual, sq.residual <= tol))
        return out

    def oracles():
        worst = max(abs(pp_constant_masa_hamming(w) - pp_constant_masa_oracle(w)) for w in unitaries)
        out = [check("masa_pp_constant_oracle", worst, worst <= tol, samples=len(unitaries))]
        worst_ce = 0.0
        for alg in probes:
            axioms = conditional_expectation(alg).axiom_residuals()
            worst_ce = max(worst_ce, max(axioms.values()))
        out.append(check("conditional_expectation_axioms", worst_ce, worst_ce <= tol, samples=len(probes)))
        return out

    def spectra():
        out = []
        cls = classify_phase_ratio(parse_angle("0"), parse_angle("1/5"))
        for k in range(0, lev4 // 2 + 1):
            same = predicted_multiplicities(k, cls).entries == measured_spectrum(k, t4b, t4).entries
            out.append(check(f"spectrum.k{k}", 0.0, same))
        return out

    body = run_sections(
        {"tower_verification": towers, "identities": identities, "oracles": oracles, "spectra": spectra}
    )
    residuals = [c["residual"] for section in body.values() for c in section]
    body["max_residual"] = _clean(max(residuals, default=0.0))
    params = {"levels": levels, "fuzz": fuzz, "seed": seed}
    return _envelope("verify", params, {"structural": tol}, body)


# ---------------------------------------------------------------------- argument parsing
def _angle(text: str) -> Angle:
    try:
        return parse_angle(text)
    except UsageError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinlab", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"spinlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p2 = sub.add_parser("invariants2", help="two-by-two pair report")
    p2.add_argument("--alpha", type=_angle, required=True, help="angle as p/q (times pi) or irr:x")
    p2.add_argument("--beta", type=_angle, required=True)
    p2.add_argument("--levels", type=_nonneg_int, default=4)
    p2.add_argument("--tol", type=float, default=1e-9)
    p2.add_argument("--out")

    p4 = sub.add_parser("invariants4", help="four-by-four pair report")
    p4.add_argument("--a", type=_angle, required=True, help="parameter in [0, 1) times pi, or irr:x")
    p4.add_argument("--b", type=_angle, required=True)
    p4.add_argument("--levels", type=_nonneg_int, default=3)
    p4.add_argument("--tol", type=float, default=1e-9)
    p4.add_argument("--out")

    pt = sub.add_parser("table1", help="family comparison table")
    pt.add_argument("--out", help="output path; a .csv suffix selects CSV")
    pt.add_argument("--format", choices=("json", "csv"))

    pv = sub.add_parser("verify", help="run the verification suite")
    pv.add_argument("--levels", type=_nonneg_int)
    pv.add_argument("--fuzz", type=float, default=0.0, help="perturb u_1 of the two-by-two tower")
    pv.add_argument("--seed", type=int, default=DEFAULT_SEED)
    pv.add_argument("--out")
    return parser


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "invariants2":
            report = cmd_invariants2(args.alpha, args.beta, args.levels, args.tol)
        elif args.command == "invariants4":
            report = cmd_invariants4(args.a, args.b, args.levels, args.tol)
        elif args.command == "table1":
            report = cmd_table1()
        else:
            report = cmd_verify(args.levels, args.fuzz, args.seed)
    except (EquivalentSeeds, OutOfParameterRange, DegeneratePair, UsageError) as exc:
        print(f"spinlab: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (SpinlabError, DimensionOverflow) as exc:
        print(f"spinlab: failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if args.command == "table1":
        fmt = args.format or ("csv" if args.out and args.out.endswith(".csv") else "json")
        _emit(table1_csv(report) if fmt == "csv" else dumps(report), args.out)
    else:
        _emit(dumps(report), args.out)
    return 1 if report["failures"] else 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
