# app/cli.py
"""
Command-line front end. Exit codes: 0 success, 1 a claim was refuted,
2 usage or resource error.
"""

import argparse
from contextlib import closing
import sys
from typing import List, Optional

from pydantic import ValidationError

from app import crud
from app.config import TOOL_VERSION
from app.database import connect, create_tables
from app.errors import TestSpaceError
from app.extensions import (EXTENSIONS, check_extension_laws, get_extension, is_reasonable, is_regular, space_of,
                            tensor_space)
from app.labels import label_text, standard_labels
from app.logging_config import get_logger
from app.models import CheckResult, MorphismFile
from app.products import bipartite, cartesian_product, fr_product, is_non_signaling, is_separable
from app.render import render_hasse, render_report
from app.serialization import (canonical_json, read_construction, read_space, read_state, vertex_table,
                               vertices_csv, write_construction, write_space, write_text)
from app.states import dispersion_free_states, is_sharp, rational_text, span_dimension, state_polytope
from app.symmetry import strongify
from app.testspace import (Morphism, build_classical, build_graph, build_grid, build_logic, build_triangle,
                           check_morphism, direct_sum, is_algebraic)
from app.verification import SUITES, load_expectations, run_suite

logger = get_logger("cli")

EXIT_OK, EXIT_REFUTED, EXIT_ERROR = 0, 1, 2


def _labels(args) -> List[str]:
    if args.labels:
        return [x.strip() for x in args.labels.split(",") if x.strip()]
    return list(standard_labels(args.n))


def _emit_check(result: CheckResult, path: Optional[str] = None) -> int:
    status = "verified" if result.holds else "refuted"
    write_text(canonical_json({"claim": result.claim, "status": status, "witness": result.witness,
                               "details": result.details}), path)
    return EXIT_OK if result.holds else EXIT_REFUTED


# --- build ---
def cmd_build(args) -> int:
    kind = args.kind
    if kind == "classical":
        space = build_classical(_labels(args), name=args.name or "")
    elif kind == "grid":
        space = build_grid(_labels(args), name=args.name or "")
    elif kind == "graph":
        space = build_graph(_labels(args), name=args.name or "")
    elif kind == "triangle":
        space = build_triangle(name=args.name or "triangle")
    elif kind == "construction" and args.from_file:
        data = read_construction(args.from_file)
        space = data.space
    else:
        es = space_of(get_extension(args.ext), tuple(_labels(args)), args.base_point, check_base_point=True)
        data = es.construction
        space = data.space
    if kind in ("construction", "ext-space"):
        if args.write_construction:
            write_construction(data, args.write_construction)
        if kind == "construction" and args.strongify:
            data, check = strongify(data)
            logger.info("strongified construction is strongly symmetric: %s", check.holds)
            space = data.space
        if args.name:
            space = space.model_copy(update={"name": args.name})
    write_space(space, args.output)
    if args.store:
        with closing(connect()) as db:
            create_tables(db)
            crud.save_space(db, space)
    return EXIT_OK


# --- states ---
def cmd_states(args) -> int:
    space = read_space(args.space)
    if args.dispersion_free:
        found = dispersion_free_states(space)
        write_text(canonical_json({"space": space.name, "outcomes": [label_text(x) for x in space.outcomes],
                                   "states": [w.as_strings() for w in found]}), args.output)
        return EXIT_OK
    polytope = state_polytope(space)
    if args.dim:
        span = span_dimension(space, polytope)
        write_text(canonical_json({"space": space.name, "affine_dim": polytope.affine_dim,
                                   "span_dim": span.dimension,
                                   "order_unit_failures": [list(t) for t in span.check_order_unit()]}), args.output)
        return EXIT_OK
    if args.sharp:
        result = is_sharp(space, polytope)
        return _emit_check(CheckResult(claim="sharp", holds=result.holds,
                                       witness=[label_text(x) for x in result.witness] if result.witness else None),
                           args.output)
    if args.csv:
        write_text(vertices_csv(polytope), args.output)
    else:
        write_text(canonical_json(vertex_table(polytope)), args.output)
    return EXIT_OK


# --- product ---
def cmd_product(args) -> int:
    if args.ext_tensor:
        ext = get_extension(args.ext_tensor)
        tensor = tensor_space(ext, standard_labels(args.n), standard_labels(args.m, prefix="u"))
        write_space(tensor.space, args.output)
        return EXIT_OK
    if not (args.first and args.second):
        raise TestSpaceError("product needs two space files unless --ext-tensor is given")
    first, second = read_space(args.first), read_space(args.second)
    if args.fr:
        space = fr_product(first, second)
    elif args.sum:
        space = direct_sum(first, second)
    else:
        space = cartesian_product(first, second)
    write_space(space, args.output)
    return EXIT_OK


# --- check ---
def _read_morphism(path: str, source, target) -> Morphism:
    with open(path, "r", encoding="utf-8") as f:
        try:
            document = MorphismFile.model_validate_json(f.read())
        except ValidationError as exc:
            raise TestSpaceError(f"{path} is not a morphism file: {exc.errors()[0]['msg']}") from exc
    try:
        images = tuple(target.mask(document.images[label_text(x)]) for x in source.outcomes)
    except KeyError as exc:
        raise TestSpaceError(f"morphism file does not mention outcome {exc.args[0]}") from exc
    return Morphism(source=source, target=target, images=images)


def cmd_check(args) -> int:
    space = read_space(args.space)
    if args.algebraic:
        result = is_algebraic(space)
        witness = None
        if result.witness:
            witness = dict(zip(("A", "B", "C"), ([label_text(space.outcomes[i]) for i in part]
                                                 for part in result.witness)))
        return _emit_check(CheckResult(claim="algebraic", holds=result.algebraic, witness=witness), args.output)
    if args.sharp:
        result = is_sharp(space)
        return _emit_check(CheckResult(claim="sharp", holds=result.holds,
                                       witness=[label_text(x) for x in result.witness] if result.witness else None),
                           args.output)
    if args.other is None:
        raise TestSpaceError("this check needs a second space file")
    other = read_space(args.other)
    if args.morphism:
        check = check_morphism(_read_morphism(args.morphism, space, other))
        witness = None
        if not check.ok:
            witness = {"condition": check.condition,
                       "events": [[label_text(space.outcomes[i]) for i in e] for e in check.witness or ()]}
        return _emit_check(CheckResult(claim="morphism", holds=check.ok, witness=witness), args.output)
    if not args.state:
        raise TestSpaceError("--nonsignaling and --separable need --state")
    product = cartesian_product(space, other)
    weights = read_state(args.state, product).weights
    state = bipartite(space, other, weights)
    if args.nonsignaling:
        result = is_non_signaling(state)
        return _emit_check(CheckResult(claim="nonsignaling", holds=result.holds,
                                       witness=result.witness.model_dump() if result.witness else None), args.output)
    result = is_separable(state)
    if result.separable:
        details = {"decomposition": [[p, q, rational_text(c)] for p, q, c in result.decomposition]}
        return _emit_check(CheckResult(claim="separable", holds=True, details=details), args.output)
    witness = {"functional": [rational_text(c) for c in result.functional], "offset": rational_text(result.offset)}
    return _emit_check(CheckResult(claim="separable", holds=False, witness=witness), args.output)


# --- logic ---
def cmd_logic(args) -> int:
    space = read_space(args.space)
    logic = build_logic(space)
    if args.dot:
        write_text(render_hasse(logic), args.output)
        return EXIT_OK
    document = {
        "space": space.name,
        "elements": [space.text_of(rep) for rep in logic.representatives],
        "atoms": [space.text_of(logic.representatives[a]) for a in logic.atoms()],
        "boolean": logic.is_boolean(),
        "axiom_failures": logic.check_axioms(),
    }
    write_text(canonical_json(document), args.output)
    return EXIT_OK if not document["axiom_failures"] else EXIT_REFUTED


# --- ext ---
def cmd_ext(args) -> int:
    ext = get_extension(args.ext)
    results: List[CheckResult] = []
    if args.laws:
        results.extend(check_extension_laws(ext, args.max_n))
    if args.regular:
        results.append(is_regular(ext, args.max_n))
    if args.reasonable:
        results.append(is_reasonable(ext, args.max_n))
    if not results:
        raise TestSpaceError("choose at least one of --laws, --regular, --reasonable")
    write_text(canonical_json([r.model_dump() for r in results]), args.output)
    return EXIT_OK if all(r.holds for r in results) else EXIT_REFUTED


# --- verify / history ---
def cmd_verify(args) -> int:
    expectations = load_expectations(args.expectations) if args.expectations else None
    report = run_suite(args.suite, ext=args.ext, max_n=args.max_n, expectations=expectations)
    write_text(canonical_json(report), args.report)
    if args.markdown:
        write_text(render_report(report), args.markdown)
    if args.store:
        with closing(connect()) as db:
            create_tables(db)
            run_id = crud.log_run(db, report)
        print(f"stored run {run_id}", file=sys.stderr)
    return report.exit_code


def cmd_history(args) -> int:
    with closing(connect()) as db:
        create_tables(db)
        if args.run is not None:
            report = crud.get_run(db, args.run)
            if report is None:
                raise TestSpaceError(f"no stored run {args.run}")
            write_text(canonical_json(report), args.output)
            return EXIT_OK
        runs = crud.get_runs(db, suite=args.suite)
    write_text(canonical_json([r.model_dump(mode="json") for r in runs]), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="test-spaces", description="Exact test-space workbench")
    parser.add_argument("--version", action="version", version=f"%(prog)s {TOOL_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    build = sub.add_parser("build", help="write a test-space file")
    build.add_argument("kind", choices=["classical", "grid", "graph", "triangle", "construction", "ext-space"])
    build.add_argument("--n", type=int, default=2)
    build.add_argument("--labels", help="comma-separated outcome labels (overrides --n)")
    build.add_argument("--ext", choices=sorted(EXTENSIONS), default="graph")
    build.add_argument("--base-point", type=int, default=0)
    build.add_argument("--strongify", action="store_true", help="construction only: quotient by the fixer of E")
    build.add_argument("--from-file", help="construction only: read (G, H, K, x0) from a construction file")
    build.add_argument("--write-construction", metavar="PATH", help="also write (G, H, K, x0) as a construction file")
    build.add_argument("--name")
    build.add_argument("--store", action="store_true", help="also save the space in the store")
    build.add_argument("-o", "--output")
    build.set_defaults(handler=cmd_build)

    states = sub.add_parser("states", help="state polytope of a space file")
    states.add_argument("space")
    mode = states.add_mutually_exclusive_group()
    mode.add_argument("--vertices", action="store_true", help="vertex table (default)")
    mode.add_argument("--dim", action="store_true")
    mode.add_argument("--sharp", action="store_true")
    mode.add_argument("--dispersion-free", action="store_true")
    states.add_argument("--csv", action="store_true", help="vertices as CSV")
    states.add_argument("-o", "--output")
    states.set_defaults(handler=cmd_states)

    product = sub.add_parser("product", help="combine two space files")
    product.add_argument("first", nargs="?")
    product.add_argument("second", nargs="?")
    kind = product.add_mutually_exclusive_group()
    kind.add_argument("--cartesian", action="store_true", help="product tests E x F (default)")
    kind.add_argument("--fr", action="store_true", help="two-stage product")
    kind.add_argument("--sum", action="store_true", help="direct sum")
    kind.add_argument("--ext-tensor", choices=sorted(EXTENSIONS), help="G(A x B) of an extension")
    product.add_argument("--n", type=int, default=2)
    product.add_argument("--m", type=int, default=2)
    product.add_argument("-o", "--output")
    product.set_defaults(handler=cmd_product)

    check = sub.add_parser("check", help="check a property of a space, state or morphism")
    check.add_argument("space")
    check.add_argument("other", nargs="?", help="second space (bipartite checks, morphism target)")
    prop = check.add_mutually_exclusive_group(required=True)
    prop.add_argument("--nonsignaling", action="store_true")
    prop.add_argument("--separable", action="store_true")
    prop.add_argument("--algebraic", action="store_true")
    prop.add_argument("--sharp", action="store_true")
    prop.add_argument("--morphism", metavar="MAP_FILE")
    check.add_argument("--state", help="bipartite state file indexed like the cartesian product")
    check.add_argument("-o", "--output")
    check.set_defaults(handler=cmd_check)

    logic = sub.add_parser("logic", help="logic of an algebraic space")
    logic.add_argument("space")
    logic.add_argument("--dot", action="store_true", help="Hasse diagram in DOT")
    logic.add_argument("-o", "--output")
    logic.set_defaults(handler=cmd_logic)

    ext = sub.add_parser("ext", help="check the laws of a built-in extension")
    ext.add_argument("ext", choices=sorted(EXTENSIONS))
    ext.add_argument("--laws", action="store_true")
    ext.add_argument("--regular", action="store_true")
    ext.add_argument("--reasonable", action="store_true")
    ext.add_argument("--max-n", type=int, default=3)
    ext.add_argument("-o", "--output")
    ext.set_defaults(handler=cmd_ext)

    verify = sub.add_parser("verify", help="run a verification suite")
    verify.add_argument("suite", choices=SUITES)
    verify.add_argument("--ext", choices=sorted(EXTENSIONS), default="graph")
    verify.add_argument("--max-n", type=int, default=3)
    verify.add_argument("--report", help="report JSON file (stdout when omitted)")
    verify.add_argument("--markdown", help="also write a Markdown report")
    verify.add_argument("--expectations", help="expected-outcome file (defaults to the shipped one)")
    verify.add_argument("--store", action="store_true", help="record the run in the store")
    verify.set_defaults(handler=cmd_verify)

    history = sub.add_parser("history", help="stored verification runs")
    history.add_argument("--run", type=int)
    history.add_argument("--suite")
    history.add_argument("-o", "--output")
    history.set_defaults(handler=cmd_history)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ValidationError as e:
        # model validators wrap library errors raised while building a space
        print(f"error: {e.errors()[0]['msg']}", file=sys.stderr)
        return EXIT_ERROR
    except (TestSpaceError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
