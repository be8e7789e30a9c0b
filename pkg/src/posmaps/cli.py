"""Command-line front end.

Matrices are exchanged as JSON objects ``{"dim1": n, "dim2": m, "data": [[re, im], ...]}``
in row-major order; plain matrices omit ``dim2``. Exit codes: 0 success,
1 usage or parse error, 2 definite negative finding, 3 cross-check disagreement.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

import numpy as np

from . import abelian, certify, choi, choifamily, symmetry
from .errors import NotReducible, PosMapsError
from .matcore import BipartiteOperator, matrix_unit

EXIT_OK, EXIT_USAGE, EXIT_NEGATIVE, EXIT_DISAGREE = 0, 1, 2, 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# matrix files


def matrix_to_json(m: np.ndarray, dim1: int, dim2: int | None = None) -> str:
    m = np.asarray(m, dtype=np.complex128)
    obj = {"dim1": dim1}
    if dim2 is not None:
        obj["dim2"] = dim2
    obj["data"] = [[float(z.real), float(z.imag)] for z in m.ravel()]
    return json.dumps(obj) + "\n"


def operator_to_json(op: BipartiteOperator) -> str:
    return matrix_to_json(op.matrix, op.dim1, op.dim2)


def parse_matrix_file(text: str) -> tuple[np.ndarray, int, int | None]:
    """Return ``(matrix, dim1, dim2)``; ``dim2`` is ``None`` for plain matrices."""
    try:
        obj = json.loads(text)
        dim1 = obj["dim1"]
        dim2 = obj.get("dim2")
        data = obj["data"]
    except (json.JSONDecodeError, KeyError, TypeError, AttributeError) as exc:
        raise UsageError(f"malformed matrix file: {exc}") from None
    if not isinstance(dim1, int) or dim1 < 1 or (dim2 is not None and (not isinstance(dim2, int) or dim2 < 1)):
        raise UsageError("dim1/dim2 must be positive integers")
    size = dim1 * (dim2 or 1)
    try:
        arr = np.array(data, dtype=float)
    except (TypeError, ValueError):
        raise UsageError("data must be a list of [re, im] pairs") from None
    if arr.shape != (size * size, 2):
        raise UsageError(f"expected {size * size} [re, im] pairs, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise UsageError("data contains non-finite numbers")
    return (arr[:, 0] + 1j * arr[:, 1]).reshape(size, size), dim1, dim2


def _read(path: str) -> tuple[np.ndarray, int, int | None]:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return parse_matrix_file(text)


def load_operator(path: str) -> BipartiteOperator:
    m, d1, d2 = _read(path)
    if d2 is None:
        raise UsageError(f"{path}: expected a bipartite operator (dim2 missing)")
    return BipartiteOperator(m, d1, d2)


def load_plain(path: str) -> np.ndarray:
    m, _, d2 = _read(path)
    if d2 not in (None, 1):
        raise UsageError(f"{path}: expected a plain matrix")
    return m


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _fmt(z: complex) -> str:
    z = complex(z) + 0.0  # drop negative zeros
    return f"{z.real:.6g}" if abs(z.imag) < 1e-12 else f"{z.real:.6g}{z.imag:+.6g}j"


def _matrix_lines(m: np.ndarray) -> list[str]:
    return ["  [" + ", ".join(_fmt(z) for z in row) + "]" for row in np.asarray(m)]


# ---------------------------------------------------------------------------
# gen


def _int_arg(args: list[str], idx: int, default: int | None = None) -> int:
    if idx < len(args):
        try:
            return int(args[idx])
        except ValueError:
            raise UsageError(f"expected an integer, got {args[idx]!r}") from None
    if default is None:
        raise UsageError("missing integer argument")
    return default


def _float_arg(args: list[str], idx: int) -> float:
    if idx >= len(args):
        raise UsageError("missing numeric argument")
    try:
        return float(args[idx])
    except ValueError:
        raise UsageError(f"expected a number, got {args[idx]!r}") from None


_FIXTURES = ("embedded_swap_plus_e12e3", "embedded_swap_plus_e3e3")


def generate(name: str, args: list[str], seed: int) -> str:
    """Serialized fixture ``name`` with positional ``args``."""
    if name == "w":
        return operator_to_json(choi.transposition_choi(_int_arg(args, 0, 3)))
    if name == "wminus":
        return operator_to_json(choifamily.w_minus())
    if name == "r":
        return operator_to_json(choifamily.r_matrix())
    if name == "rho_lambda":
        return operator_to_json(choifamily.rho_lambda(_float_arg(args, 0)))
    if name == "choi_classic":
        return operator_to_json(choifamily.choi_map_classic())
    if name == "max_ent":
        return operator_to_json(choi.max_entangled_choi(_int_arg(args, 0, 3)))
    if name == "p_tensor_id":
        n = _int_arg(args, 1, 3)
        i = _int_arg(args, 0, 1) - 1
        if not 0 <= i < n:
            raise UsageError("projector index out of range")
        return operator_to_json(choi.product_with_identity(matrix_unit(i, i, n), n))
    if name == "random_symmetry":
        return operator_to_json(symmetry.random_symmetry_in_D(_int_arg(args, 0, 3), seed))
    if name == "partial_fixture":
        k = args[0] if args else "1"
        which = _FIXTURES[int(k) - 1] if k in ("1", "2") else k
        if which not in _FIXTURES:
            raise UsageError(f"unknown partial fixture {k!r}")
        return operator_to_json(symmetry.partial_symmetry_fixture(which))
    if name == "s0":
        return operator_to_json(symmetry.s0_symmetry())
    if name in ("koverlap", "kchoi"):
        i = _int_arg(args, 0) - 1
        fam = (
            abelian.overlapping_range_family()
            if name == "koverlap"
            else abelian.restrict_to_diagonal(choifamily.choi_map_classic())
        )
        if not 0 <= i < len(fam):
            raise UsageError("operator index out of range")
        return matrix_to_json(fam.K[i], fam.dim)
    if name == "eii":
        i, n = _int_arg(args, 0) - 1, _int_arg(args, 1, 3)
        if not 0 <= i < n:
            raise UsageError("index out of range")
        return matrix_to_json(matrix_unit(i, i, n), n)
    raise UsageError(f"unknown fixture {name!r}")


def cmd_gen(ns) -> int:
    _emit(generate(ns.name, ns.args, ns.seed), ns.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# analyze


def analyze_report(rho: BipartiteOperator, seed: int, restarts: int, tol: float) -> dict:
    if rho.dim1 != rho.dim2:
        raise UsageError("analysis needs equal factor dimensions")
    mem = choi.membership_D(rho, restarts=restarts, seed=seed, tol=tol)
    cert = mem.block_positive
    report = {
        "dim": rho.dim1,
        "hermitian": mem.hermitian,
        "trace": mem.trace_value,
        "trace_ok": mem.trace_ok,
        "unital": mem.unital,
        "block_positive": None if cert is None else not cert.has_witness,
        "min_product_value": None if cert is None else cert.min_value_found,
        "witness": None,
        "membership": mem.verdict,
        "involution": symmetry.classify_involution(rho).kind,
        "cp": None,
        "cocp": None,
        "alpha": None,
    }
    if cert is not None and cert.has_witness:
        report["witness"] = {
            "x": [[float(z.real), float(z.imag)] for z in cert.witness_x],
            "y": [[float(z.real), float(z.imag)] for z in cert.witness_y],
        }
    if mem.hermitian:
        h = rho.with_matrix(0.5 * (rho.matrix + rho.matrix.conj().T))
        report["cp"] = certify.is_cp(h, tol)
        report["cocp"] = certify.is_cocp(h, tol)
        report["alpha"] = certify.alpha_norm(h, restarts=restarts, seed=seed).value
    return report


def cmd_analyze(ns) -> int:
    rep = analyze_report(load_operator(ns.path), ns.seed, ns.restarts, ns.tol)
    if ns.json:
        print(json.dumps(rep))
        return EXIT_OK
    yes = {True: "yes", False: "no", None: "n/a"}
    print(f"dimension        {rep['dim']}x{rep['dim']}")
    print(f"hermitian        {yes[rep['hermitian']]}")
    print(f"trace            {rep['trace']:.12g} ({'ok' if rep['trace_ok'] else 'expected ' + str(rep['dim'])})")
    print(f"unital           {yes[rep['unital']]}")
    bp = yes[rep["block_positive"]]
    if rep["witness"] is not None:
        bp += f" (witness value {rep['min_product_value']:.12g})"
    elif rep["min_product_value"] is not None:
        bp += f" (no witness; min found {rep['min_product_value']:.3g})"
    print(f"block positive   {bp}")
    print(f"D membership     {rep['membership']}")
    print(f"involution       {rep['involution']}")
    print(f"CP               {yes[rep['cp']]}")
    print(f"coCP             {yes[rep['cocp']]}")
    print(f"alpha            {'n/a' if rep['alpha'] is None else format(rep['alpha'], '.10g')}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# reduce


def cmd_reduce(ns) -> int:
    rho = load_operator(ns.path)
    if rho.dim1 != rho.dim2 or rho.dim1 not in (2, 3):
        raise UsageError("reduce expects a 2x2 or 3x3 bipartite operator")
    try:
        res = symmetry.reduce_to_transposition(rho, tol=ns.tol)
    except NotReducible as exc:
        if ns.json:
            print(json.dumps({"reducible": False, "reason": exc.reason}))
        else:
            print(f"not reducible: {exc.reason}")
            if exc.detail:
                print(exc.detail)
        return EXIT_NEGATIVE
    if ns.json:
        pairs = lambda m: [[[float(z.real), float(z.imag)] for z in row] for row in m]  # noqa: E731
        print(json.dumps({"reducible": True, "U": pairs(res.U), "V": pairs(res.V),
                          "reconstruction_error": res.reconstruction_error}))
        return EXIT_OK
    print("U =")
    print("\n".join(_matrix_lines(res.U)))
    print("V =")
    print("\n".join(_matrix_lines(res.V)))
    print(f"reconstruction error {res.reconstruction_error:.3e}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep


def cmd_sweep(ns) -> int:
    if not ns.grid_step > 0:
        raise UsageError("--grid-step must be positive")
    lines = []
    disagreements = []
    if ns.segment:
        lines.append("lambda,cond,cert,min_value")
        for row in choifamily.segment_law(restarts=ns.restarts, seed=ns.seed):
            lines.append(f"{row.lam!r},{row.cond},{row.cert},{row.min_value!r}")
            if row.disagreement:
                disagreements.append(f"lambda={row.lam}: expected {row.cond}, got {row.cert}")
    else:
        lines.append("a,b,c,cond,cert,min_value")
        for row in choifamily.sweep_abc(ns.grid_step, restarts=ns.restarts, seed=ns.seed, tol=ns.tol):
            lines.append(f"{row.a!r},{row.b!r},{row.c!r},{row.cond},{row.cert},{row.min_value!r}")
            if row.disagreement:
                disagreements.append(
                    f"(a,b,c)=({row.a},{row.b},{row.c}): conditions say {row.cond}, "
                    f"search says {row.cert} (min {row.min_value:.3e})"
                )
    _emit("\n".join(lines) + "\n", ns.out)
    for msg in disagreements:
        print(f"DISAGREEMENT {msg}", file=sys.stderr)
    return EXIT_DISAGREE if disagreements else EXIT_OK


# ---------------------------------------------------------------------------
# arveson


def cmd_arveson(ns) -> int:
    mats = [load_plain(p) for p in ns.paths]
    if len({m.shape for m in mats}) != 1:
        raise UsageError("all matrices must have the same size")
    fam = abelian.ArvesonDecomposition.from_operators(mats)
    psd = all(
        np.allclose(k, k.conj().T, atol=ns.tol) and np.linalg.eigvalsh(0.5 * (k + k.conj().T))[0] >= -ns.tol
        for k in fam.K
    )
    if not psd:
        raise UsageError("operators must be Hermitian positive semidefinite")
    unit_sum = bool(np.max(np.abs(fam.sum - np.eye(fam.dim))) <= ns.tol)
    out = {"psd": psd, "sums_to_identity": unit_sum, "renormalized": False, "ranks": list(fam.ranks)}
    lines = []
    if not unit_sum:
        try:
            fam = abelian.renormalize(fam)
        except PosMapsError as exc:
            raise UsageError(f"cannot renormalize: {exc}") from None
        out["renormalized"] = True
        lines.append("sum is not the identity; using S^-1/2 K_i S^-1/2")
        for i, k in enumerate(fam.K, 1):
            lines.append(f"K~{i} =")
            lines.extend(_matrix_lines(k))
    for i in range(len(fam)):
        for j in range(i + 1, len(fam)):
            prod = fam.K[i] @ fam.K[j]
            if np.max(np.abs(prod)) > ns.tol:
                lines.append(f"K{i + 1} K{j + 1} =")
                lines.extend(_matrix_lines(prod))
    out["weakly_independent"] = abelian.weak_independence(fam)
    out["cstar_extreme"] = abelian.is_cstar_extreme(fam)
    out["verdict"] = abelian.arveson_extreme_check(fam)
    if ns.json:
        print(json.dumps(out))
        return EXIT_OK
    yes = {True: "yes", False: "no"}
    print(f"positive semidefinite  {yes[psd]}")
    print(f"sums to identity       {yes[unit_sum]}")
    print(f"ranks                  {', '.join(map(str, out['ranks']))}")
    for line in lines:
        print(line)
    print(f"weakly independent     {yes[out['weakly_independent']]}")
    print(f"C*-extreme             {yes[out['cstar_extreme']]}")
    print(f"verdict                {out['verdict'].replace('_', ' ')}")
    return EXIT_OK


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _seed(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("seed must be a non-negative integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="posmaps", description="Analyze Choi matrices of positive maps.")
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=_seed, default=0)
    common.add_argument("--restarts", type=int, default=certify.DEFAULT_RESTARTS)
    common.add_argument("--tol", type=float, default=certify.DEFAULT_TOL)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--out", default=None, help="output file (default stdout)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", parents=[common], help="membership, involution type, CP/coCP, alpha")
    p.add_argument("path")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("gen", parents=[common], help="write a fixture matrix file")
    p.add_argument("name")
    p.add_argument("args", nargs="*")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("reduce", parents=[common], help="local unitaries carrying w to a symmetry")
    p.add_argument("path")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("sweep-choi", parents=[common], help="cross-check the generalized Choi family")
    p.add_argument("--grid-step", type=float, default=0.25)
    p.add_argument("--segment", action="store_true", help="scan rho_lambda on 11 points instead")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("arveson", parents=[common], help="extremality of a diagonal restriction")
    p.add_argument("paths", nargs="+")
    p.set_defaults(func=cmd_arveson)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    if getattr(ns, "restarts", 1) < 0:
        print("posmaps: error: --restarts must be non-negative", file=sys.stderr)
        return EXIT_USAGE
    try:
        return ns.func(ns)
    except (UsageError, PosMapsError) as exc:
        print(f"posmaps: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
