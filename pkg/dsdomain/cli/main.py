import functools
import json
import logging
import sys
from fractions import Fraction
from typing import IO, Any, Callable, List, Optional, Type, TypeVar

import click
from pydantic import BaseModel, ValidationError

from dsdomain.config import Settings, load_settings
from dsdomain.core.busemann import asymptotic_limit, busemann_value, contact_along_path, horoball_contains
from dsdomain.core.matcore import Isometry, SpacePoint, to_literal
from dsdomain.core.satake import SatakePoint
from dsdomain.errors import BoundaryPointError, DomainError
from dsdomain.harness.corpus import load_corpus
from dsdomain.harness.slices import emit_slice
from dsdomain.harness.sweeps import SUITES, run_suite
from dsdomain.harness.verify import example_satake_cycle, verify_example
from dsdomain.models.schemas import (
    AsymptoticRequest,
    BusemannRequest,
    CycleEntry,
    CycleReport,
    ExpressRequest,
    FixedPointRequest,
    GeneratorRequest,
    InvarianceRequest,
    PolytopeRequest,
    SliceRequest,
    word_from,
)
from dsdomain.poincare.angles import angle_sum
from dsdomain.poincare.cusps import cycle_fixed_point, expressibility, invariance_check
from dsdomain.poincare.domain import DomainWithPairing, build_domain, check_exact, ridge_cycles
from dsdomain.polyhedra.polytope import ProjPolytope, face_poset, satake_components, satake_faces

logger = logging.getLogger(__name__)

M = TypeVar("M", bound=BaseModel)


def _guarded(fn: Callable) -> Callable:
    @functools.wraps(fn)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return fn(*args, **kwargs)
        except (DomainError, ValidationError) as e:
            raise click.ClickException(f"{type(e).__name__}: {e}")
    return wrapper


def _read(source: Optional[IO[str]], model: Type[M]) -> M:
    if source is None:
        raise click.UsageError("give an INPUT file (or - for stdin), or --example")
    return model.model_validate_json(source.read())


def _default(value: Any) -> Any:
    if isinstance(value, Fraction):
        return str(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _emit(payload: Any, ok: bool = True) -> None:
    if isinstance(payload, BaseModel):
        click.echo(payload.model_dump_json(indent=2))
    else:
        click.echo(json.dumps(payload, indent=2, default=_default))
    if not ok:
        click.get_current_context().exit(1)


def _settings() -> Settings:
    return click.get_current_context().find_root().obj


def _domain(source, example: bool) -> DomainWithPairing:
    if example:
        return build_domain(load_corpus().generator_set())
    return build_domain(_read(source, GeneratorRequest).to_generator_set())


def _facet_rows(d: DomainWithPairing) -> List[dict]:
    P = d.polytope
    return [
        {"facet": f, "vertices": list(P.faces[f].vertices), "generator": d.name(f), "partner": d.pairing.get(f)}
        for f in sorted(d.facet_map)
    ]


input_argument = click.argument("source", metavar="INPUT", type=click.File("r"), required=False)
example_option = click.option("--example", is_flag=True, help="Use the built-in worked example.")


@click.group()
@click.option("--config", type=click.Path(exists=True, dir_okay=False), help="Settings JSON file.")
@click.option("-v", "--verbose", is_flag=True, help="Log at DEBUG level.")
@click.option("--angle-tol", type=float)
@click.option("--metric-tol", type=float)
@click.option("--spectral-tol", type=float)
@click.pass_context
@_guarded
def ds(ctx, config, verbose, angle_tol, metric_tol, spectral_tol):
    """Dirichlet-Selberg domains in SL(n)/SO(n)."""
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    ctx.obj = load_settings(config, angle=angle_tol, metric=metric_tol, spectral=spectral_tol)


@ds.command()
@input_argument
@example_option
@_guarded
def build(source, example):
    """Build the Dirichlet-Selberg domain of a generator set."""
    d = _domain(source, example)
    P = d.polytope
    _emit({
        "n": P.n,
        "vertices": [to_literal(v.entries) for v in P.vertices],
        "counts": P.counts(),
        "facets": _facet_rows(d),
        "bounded": P.bounded(),
        "warnings": P.warnings,
    })


@ds.command("check-exact")
@input_argument
@example_option
@_guarded
def check_exact_cmd(source, example):
    """Check that the facet pairing is exact."""
    report = check_exact(_domain(source, example))
    _emit(report, report.ok)


@ds.command()
@input_argument
@example_option
@_guarded
def cycles(source, example):
    """List ridge cycles with their inferred orders."""
    d = _domain(source, example)
    P = d.polytope
    found = ridge_cycles(d, settings=_settings())
    report = CycleReport(cycles=[
        CycleEntry(ridges=[list(P.faces[r].vertices) for r in c.ridges], word=c.word.names, order=c.order)
        for c in found
    ])
    _emit(report, report.ok)


@ds.command("angle-sum")
@input_argument
@example_option
@click.option("--samples", type=int, default=None, help="Sample points per ridge.")
@_guarded
def angle_sum_cmd(source, example, samples):
    """Dihedral angle sums around every ridge cycle."""
    d = _domain(source, example)
    settings = _settings()
    reports = [(c, angle_sum(c, d, samples, settings)) for c in ridge_cycles(d, infer_orders=False, settings=settings)]
    payload = [{"cycle": c.word.names, **r.model_dump(mode="json")} for c, r in reports]
    _emit(payload, all(r.ok for _, r in reports))


@ds.command("fixed-point")
@input_argument
@example_option
@_guarded
def fixed_point(source, example):
    """Fixed boundary point of a Satake-face cycle word."""
    if example:
        corpus = load_corpus()
        d = build_domain(corpus.generator_set())
        cycle = example_satake_cycle(corpus, d)
        if cycle is None:
            raise BoundaryPointError("the example has no Satake cycle on the invariance edge")
        face, word = cycle.face, cycle.word
    else:
        req = _read(source, FixedPointRequest)
        gen = req.domain.to_generator_set()
        d = build_domain(gen)
        P = d.polytope
        indices = [P.vertex_index(SatakePoint.of(v).array) for v in req.face]
        face_id = P.face_by_vertices(i for i in indices if i is not None) if None not in indices else None
        face = next((s for s in satake_faces(P) if s.face == face_id), None)
        if face is None:
            raise BoundaryPointError("the given vertices do not span a Satake face of the domain")
        word = word_from(dict(zip(gen.names, gen.elements)), req.word)
    alpha = cycle_fixed_point(face, word, d, _settings())
    _emit({"word": word.names, "face": list(d.polytope.faces[face.face].vertices),
           "fixed_point": to_literal(alpha.array), "rank": alpha.rank})


@ds.command()
@input_argument
@example_option
@_guarded
def invariance(source, example):
    """Check b(w.Y) = C b(Y) for a word fixing a boundary point."""
    settings = _settings()
    if example:
        corpus = load_corpus()
        d = build_domain(corpus.generator_set())
        cycle = example_satake_cycle(corpus, d)
        if cycle is None:
            raise BoundaryPointError("the example has no Satake cycle on the invariance edge")
        word = cycle.word
        alpha = cycle_fixed_point(cycle.face, word, d, settings)
        report = invariance_check(word, alpha, settings=settings)
    else:
        req = _read(source, InvarianceRequest)
        report = invariance_check(req.to_word(), SatakePoint.of(req.alpha), req.to_component(),
                                  trials=req.trials, seed=req.seed, settings=settings)
    _emit(report, report.ok)


@ds.command()
@input_argument
@example_option
@click.option("--depth", type=int, default=4, show_default=True, help="Longest word searched.")
@_guarded
def express(source, example, depth):
    """Express each generator as a word in the facet pairings."""
    if example:
        corpus = load_corpus()
        d = build_domain(corpus.generator_set())
        pairings = {d.name(f): d.generator(f) for f in sorted(d.facet_map)}
        generators = corpus.generators
    else:
        req = _read(source, ExpressRequest)
        pairings = {k: Isometry(v) for k, v in req.pairings.items()}
        generators = {k: Isometry(v) for k, v in req.generators.items()}
    report = expressibility(list(generators.values()), list(pairings.values()), depth,
                            list(generators), list(pairings))
    _emit(report, report.ok)


@ds.command("busemann-eval")
@input_argument
@_guarded
def busemann_eval(source):
    """Evaluate a Busemann-Selberg function at the given points."""
    req = _read(source, BusemannRequest)
    spec = req.to_spec()
    horoball = req.to_horoball()
    rows = []
    points = req.evaluation_points()
    if not points:
        raise click.UsageError("give a point (or points) to evaluate")
    for literal in points:
        Y = SpacePoint(literal)
        row = {"value": busemann_value(spec, Y)}
        if horoball is not None:
            row["inside"] = horoball_contains(horoball, Y)
        rows.append(row)
    payload = {"kind": spec.kind.value, "k": spec.k, "values": rows}
    if len(rows) == 1:
        payload["value"] = rows[0]["value"]
    _emit(payload)


@ds.command()
@input_argument
@_guarded
def asymptotic(source):
    """Limit of a type-k function approaching a boundary point."""
    req = _read(source, AsymptoticRequest)
    beta, direction = SatakePoint.of(req.beta), SpacePoint.normalize(req.direction)
    limit = asymptotic_limit(req.spec.to_spec(), beta, direction, schedule=req.schedule, settings=_settings())
    payload = limit.model_dump(mode="json")
    horoball = req.spec.to_horoball()
    if horoball is not None:
        contact = contact_along_path(horoball, beta, direction, req.schedule, _settings())
        payload["contact"] = [{"eps": e, "value": v, "inside": inside} for e, v, inside in contact]
    _emit(payload, limit.consistent)


@ds.command()
@input_argument
@example_option
@_guarded
def poset(source, example):
    """Face poset of a polytope with its Satake components."""
    if example:
        P = ProjPolytope.from_vertices(load_corpus().vertices)
    else:
        P = _read(source, PolytopeRequest).to_polytope()
    _emit({
        "counts": P.counts(),
        "faces": face_poset(P),
        "satake_components": [
            {"face": list(P.faces[s.face].vertices), "type": s.type, "span": to_literal(s.component.basis.T)}
            for s in satake_components(P)
        ],
        "warnings": P.warnings,
    })


@ds.command("verify-example")
@click.option("--json", "as_json", is_flag=True, help="Print the full report as JSON.")
@click.option("--samples", type=int, default=None, help="Sample points per ridge.")
@click.option("--trials", type=int, default=50, show_default=True, help="Invariance trials.")
@_guarded
def verify_example_cmd(as_json, samples, trials):
    """Run the worked-example pipeline end to end."""
    report = verify_example(settings=_settings(), samples=samples, trials=trials)
    if as_json:
        _emit(report, report.ok)
        return
    for item in report.items:
        line = f"{item.name:<18} {'PASS' if item.ok else 'FAIL'}"
        click.echo(f"{line}  {item.detail}" if item.detail else line)
    click.echo("OK" if report.ok else "FAILED")
    if not report.ok:
        click.get_current_context().exit(1)


@ds.command()
@click.option("--suite", type=click.Choice(sorted(SUITES)), required=True)
@click.option("--trials", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@_guarded
def proptest(suite, trials, seed):
    """Seeded property sweep."""
    report = run_suite(suite, trials, seed, _settings())
    _emit(report, report.ok)


@ds.command("slice")
@input_argument
@click.option("--out", type=click.File("w"), default="-", help="CSV destination (default stdout).")
@_guarded
def slice_cmd(source, out):
    """Busemann-Selberg values on the diagonal plane, as CSV."""
    req = _read(source, SliceRequest)
    rows = emit_slice(req.busemann.to_spec(), req.levels, req.to_grid(), out)
    logger.info("slice: %d rows", rows)


def main() -> None:
    ds(prog_name="ds")


if __name__ == "__main__":
    main()
