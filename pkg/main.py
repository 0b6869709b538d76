# ------ main.py ------

import argparse
import logging
import os
import sys
import time

from config.config import (
    DEFAULT_BLOAT, DEFAULT_DEPTH, DEFAULT_HORIZON, DEFAULT_SAMPLE_DT, DEFAULT_SAMPLES_PER_AXIS,
    DEFAULT_TAU, DEFAULT_TMAX, RANDOM_SUITE_SEEDS, SPECS_DIR, tolerances,
)
from src.analyzer.attractors import attractor_lattice, basin, is_stable, validate_attractor
from src.analyzer.lyapunov import k0_distance, lyapunov_for
from src.analyzer.morse import MorseDecomposition, morse_decomposition, morse_graph, verify_morse
from src.dynsys.flow import trajectory
from src.errors import AnalysisError, EmptyAttractor, InputError
from src.exporter.dot import morse_dot, morse_json, save_dot
from src.exporter.report import build_report
from src.exporter.tables import basins_frame, save_json, save_table, trajectory_frame
from src.loader.spec_loader import load_chain, read_spec
from src.loader.utils import spec_stem
from src.transition.graph import condense
from src.transition.system import FROM_ODE, build_transitions
from src.verifier.suite import basin_saturated, random_suite, system_checks

logger = logging.getLogger('main')


def parse_arguments(argv=None):
    """Parse command line arguments."""
    parser = argparse.ArgumentParser(
        description='Attractors, Morse decompositions and Lyapunov functions of finite and ODE systems')
    parser.add_argument('-v', '--verbose', action='store_true', help='Log debug output to stderr')
    parser.add_argument('-q', '--quiet', action='store_true', help='Log warnings only')
    commands = parser.add_subparsers(dest='command', required=True)

    def enclosure_flags(sub):
        sub.add_argument('--depth', type=int, default=DEFAULT_DEPTH, help='Grid subdivisions per axis, as a power of 2')
        sub.add_argument('--tau', type=float, default=DEFAULT_TAU, help='Time step of the cell map')
        sub.add_argument('--bloat', type=float, default=DEFAULT_BLOAT, help='Enclosure margin in cell widths')
        sub.add_argument('--samples', type=int, default=DEFAULT_SAMPLES_PER_AXIS, help='Samples per axis and cell')

    analyze = commands.add_parser('analyze', help='Attractors and Morse decomposition of a system')
    analyze.add_argument('--spec', required=True, help='System spec (JSON)')
    analyze.add_argument('--out', required=True, help='Output directory')
    enclosure_flags(analyze)
    analyze.add_argument('--chain', default='sinks-first',
                         help="'sinks-first' or a JSON file with an increasing list of attractors")
    analyze.add_argument('--reproducible', action='store_true', help='Omit the timing block from the report')
    analyze.set_defaults(func=cmd_analyze)

    lyapunov = commands.add_parser('lyapunov', help='Lyapunov function of one lattice attractor')
    lyapunov.add_argument('--spec', required=True, help='System spec (JSON)')
    lyapunov.add_argument('--attractor-id', type=int, required=True, help='Id from attractors.json')
    lyapunov.add_argument('--out', required=True, help='Output CSV file')
    lyapunov.add_argument('--tmax', type=float, default=DEFAULT_TMAX, help='Upper limit of the integral')
    lyapunov.add_argument('--dt', type=float, default=None, help='Integrator step and quadrature step')
    enclosure_flags(lyapunov)
    lyapunov.set_defaults(func=cmd_lyapunov)

    verify = commands.add_parser('verify', help='Run the property checks')
    verify.add_argument('--spec', help='System spec (JSON); the finite fixtures if omitted')
    verify.add_argument('--seeds', type=int, nargs='?', const=RANDOM_SUITE_SEEDS, default=None,
                        help='Also run the random suite over this many seeds')
    enclosure_flags(verify)
    verify.set_defaults(func=cmd_verify)

    simulate = commands.add_parser('simulate', help='Sample one trajectory as CSV on stdout')
    simulate.add_argument('--spec', required=True, help='System spec (JSON)')
    simulate.add_argument('--x0', required=True, help='Initial state, or comma-separated coordinates')
    simulate.add_argument('--t', type=float, required=True, help='Horizon')
    simulate.add_argument('--dt', type=float, default=None, help='Integrator step override')
    simulate.add_argument('--sample-dt', type=float, default=DEFAULT_SAMPLE_DT, help='Sample spacing (ODEs)')
    simulate.set_defaults(func=cmd_simulate)

    return parser.parse_args(argv)


def build_options(args):
    return {'depth': args.depth, 'tau': args.tau, 'bloat': args.bloat, 'samples_per_axis': args.samples}


def lattice_checks(ts, lattice):
    """Validation, stability and basin saturation of every lattice attractor."""
    valid = stable = saturated = True
    details = []
    for attractor_id, record in enumerate(lattice):
        if not validate_attractor(ts, record.cells).is_attractor:
            valid = False
            details.append(f"attractor {attractor_id} fails validation")
        if not is_stable(ts, record.cells):
            stable = False
            details.append(f"attractor {attractor_id} is not stable")
        if not basin_saturated(ts, record.cells, record.basin):
            saturated = False
            details.append(f"basin of attractor {attractor_id} is not saturated")
    checks = {
        'attractors.validate': valid,
        'attractors.stable': stable,
        'attractors.basin_saturated': saturated,
    }
    return checks, details


def cmd_analyze(args):
    """Build, condense, enumerate attractors, decompose and write all outputs."""
    spec, _, digest = read_spec(args.spec)
    options = {**build_options(args), 'chain': args.chain}

    start = time.perf_counter()
    ts = build_transitions(spec, **build_options(args))
    build_seconds = time.perf_counter() - start
    cg = condense(ts)
    lattice = attractor_lattice(ts, cg)
    verification, details = lattice_checks(ts, lattice)

    chain = None if args.chain == 'sinks-first' else load_chain(args.chain, ts)
    try:
        md = morse_decomposition(ts, chain=chain)
        morse_report = verify_morse(ts, md)
        verification.update({f"morse.{name}": ok for name, ok in morse_report.checks().items()})
        details.extend(morse_report.details)
    except EmptyAttractor:
        md = MorseDecomposition(frozenset(), (frozenset(),), (), (), ())
        verification['global_attractor_nonempty'] = False
        details.append('no cell avoids the escape sink: the global attractor is empty')
    graph = morse_graph(ts, md)

    report = build_report(
        spec, digest, options, ts, cg, lattice, md, sorted(graph.edges()), verification, details,
        tolerances(), build_seconds=None if args.reproducible else build_seconds,
    )
    save_json(report.to_json(), os.path.join(args.out, 'report.json'))
    save_dot(morse_dot(graph), os.path.join(args.out, 'morse.dot'))
    save_json(morse_json(graph), os.path.join(args.out, 'morse.json'))
    save_json(lattice.to_list(), os.path.join(args.out, 'attractors.json'))
    save_table(basins_frame(ts, lattice), os.path.join(args.out, 'basins.csv'))

    for line in details:
        logger.warning(line)
    logger.info("%d attractor(s), %d Morse set(s); verification %s",
                len(lattice), len(md), 'passed' if report.passed else 'FAILED')
    return 0 if report.passed else 1


def cmd_lyapunov(args):
    """Write zeta, xi and L over the basin of one lattice attractor."""
    spec, _, _ = read_spec(args.spec)
    if args.dt is not None and args.dt <= 0:
        raise InputError(f"--dt must be positive, got {args.dt}")
    ts = build_transitions(spec, **build_options(args))
    lattice = attractor_lattice(ts)
    if not 0 <= args.attractor_id < len(lattice):
        raise InputError(f"attractor id {args.attractor_id} not in 0..{len(lattice) - 1}")
    cells = lattice[args.attractor_id].cells
    construction = lyapunov_for(ts, k0_distance(ts, cells), horizon=max(DEFAULT_HORIZON, args.tmax),
                                tmax=args.tmax, dt=args.dt)
    scope = basin(ts, cells)
    if ts.origin.kind == FROM_ODE:
        table = construction.table(ts.grid, scope)
    else:
        table = construction.table(scope)
    save_table(table, args.out)
    failed = int(table['L'].isna().sum())
    if failed:
        logger.warning("%d cell(s) without a Lyapunov value", failed)
    return 0


def cmd_verify(args):
    """Print PASS/FAIL per check; exit 1 if any check fails."""
    results = []
    if args.spec:
        spec, _, _ = read_spec(args.spec)
        options = build_options(args) if spec.kind == 'ode' else {}
        results.extend(system_checks(spec_stem(args.spec), spec, **options))
    else:
        for filename in sorted(os.listdir(SPECS_DIR)):
            if not filename.endswith('.json'):
                continue
            path = os.path.join(SPECS_DIR, filename)
            spec, _, _ = read_spec(path)
            if spec.kind != 'ode':
                results.extend(system_checks(spec_stem(path), spec))
    if args.seeds:
        results.extend(random_suite(args.seeds))
    for result in results:
        print(result.line())
    return 0 if all(r.passed for r in results) else 1


def parse_point(text):
    try:
        return [float(part) for part in text.split(',')]
    except ValueError as exc:
        raise InputError(f"--x0 must be comma-separated numbers, got {text!r}") from exc


def cmd_simulate(args):
    """Stream one sampled trajectory as CSV to stdout."""
    spec, _, _ = read_spec(args.spec)
    if spec.kind == 'ode':
        if args.dt is not None:
            spec = spec.with_dt(args.dt)
        traj = trajectory(spec, parse_point(args.x0), args.t, sample_dt=args.sample_dt)
        table = trajectory_frame(traj, dim=spec.dim)
    else:
        traj = trajectory(spec, args.x0, args.t)
        table = trajectory_frame(traj)
    sys.stdout.write(save_table(table, '-'))
    return 0


def configure_logging(args):
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, stream=sys.stderr, format='%(levelname)s %(name)s: %(message)s')


def main(argv=None):
    args = parse_arguments(argv)
    configure_logging(args)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except AnalysisError as exc:
        print(f"analysis failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
