import json
import re
from functools import wraps
from pathlib import Path

import click
from flask import Blueprint, current_app

from app.exceptions import DomainError, PropertyViolation
from app.services import dualramsey, ellinf, urysohn
from app.services.selftest import SUITES, run_selftest
from app.services.seqcore import (
    OMEGA, EPSeq, UPoint, format_rational, parse_rational, seq_from_json, seq_to_json, to_decimal,
)

bp = Blueprint('main', __name__, cli_group=None)

RATIONAL = re.compile(r'^-?\d+/\d+$')


class InputError(click.ClickException):
    exit_code = 2


class ViolationError(click.ClickException):
    exit_code = 1


def handle_errors(f):
    @wraps(f)
    def decorated_function(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except DomainError as e:
            raise InputError(f"invalid input: {e}")
        except PropertyViolation as e:
            raise ViolationError(f"property violation: {e}")
        except json.JSONDecodeError as e:
            raise InputError(f"malformed JSON: {e}")
        except OSError as e:
            raise InputError(f"cannot read input: {e}")
    return decorated_function


def output_options(f):
    f = click.option('--format', 'fmt', type=click.Choice(['json', 'table']), default=None,
                     help='Report format (defaults to OUTPUT_FORMAT).')(f)
    f = click.option('--decimal', is_flag=True,
                     help='Add approximate decimals, marked non-authoritative.')(f)
    return f


def load_json(source: str):
    """Inline JSON when the argument looks like JSON, otherwise a file path."""
    text = source if source.lstrip()[:1] in ('{', '[') else Path(source).read_text(encoding='utf-8')
    return json.loads(text)


def flatten(payload, path=''):
    if isinstance(payload, dict):
        for key in sorted(payload):
            yield from flatten(payload[key], f"{path}.{key}" if path else str(key))
    elif isinstance(payload, list):
        for i, item in enumerate(payload):
            yield from flatten(item, f"{path}[{i}]")
    else:
        yield path, payload


def emit(payload, fmt, decimal):
    fmt = fmt or current_app.config['OUTPUT_FORMAT']
    approx = {}
    if decimal:
        approx = {path: to_decimal(parse_rational(value))
                  for path, value in flatten(payload)
                  if isinstance(value, str) and RATIONAL.match(value)}
    if fmt == 'json':
        if decimal:
            payload = {'result': payload, 'approx_non_authoritative': approx}
        click.echo(json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False))
        return
    rows = list(flatten(payload))
    width = max((len(path) for path, _ in rows), default=0)
    for path, value in rows:
        shown = 'null' if value is None else str(value).lower() if isinstance(value, bool) else str(value)
        line = f"{path.ljust(width)}  {shown}"
        if path in approx:
            line += f"  (~{approx[path]}, non-authoritative)"
        click.echo(line)


@bp.cli.command('xk')
@click.argument('k', type=int)
@output_options
@handle_errors
def xk(k, fmt, decimal):
    """Emit the staircase vector x_k."""
    vec = ellinf.make_xk(k)
    emit({'k': vec.k, 'x': seq_to_json(vec.seq)}, fmt, decimal)


@bp.cli.command('h')
@click.argument('k', type=int)
@output_options
@handle_errors
def h(k, fmt, decimal):
    """Emit the rounding map h on the grid j/4k."""
    table = ellinf.h_table(k)
    emit({'k': k, 'table': [{'u': format_rational(u), 'h': format_rational(v)} for u, v in table.items()]},
         fmt, decimal)


@bp.cli.command('approx')
@click.argument('a_source')
@click.argument('k', type=int)
@output_options
@handle_errors
def approx(a_source, k, fmt, decimal):
    """Certificate that T(a) lies within 2/k of the orbit of x_k."""
    a = seq_from_json(load_json(a_source), cls=EPSeq)
    cert = ellinf.approximate_in_orbit(a, k)
    emit(ellinf.certificate_to_json(cert), fmt, decimal)


@bp.cli.command('udist')
@click.argument('x_source')
@click.argument('y_source')
@output_options
@handle_errors
def udist(x_source, y_source, fmt, decimal):
    """Distance between two U-points, with crossing index and witness."""
    x = seq_from_json(load_json(x_source), cls=UPoint)
    y = seq_from_json(load_json(y_source), cls=UPoint)
    result = urysohn.dist(x, y)
    payload = urysohn.distance_to_json(result)
    payload['bounds'] = {
        'crossing': urysohn.bounds_to_json(urysohn.prefix_bounds(x, y, result.crossing)),
        'omega': urysohn.bounds_to_json(urysohn.prefix_bounds(x, y, OMEGA)),
    }
    emit(payload, fmt, decimal)


@bp.cli.command('wr')
@click.argument('r', type=int)
@output_options
@handle_errors
def wr(r, fmt, decimal):
    """Emit the staircase U-point w_r."""
    emit({'r': r, 'w': seq_to_json(urysohn.make_wr(r))}, fmt, decimal)


@bp.cli.command('embed')
@click.argument('space_source')
@click.argument('r', type=int)
@output_options
@handle_errors
def embed(space_source, r, fmt, decimal):
    """Embed a finite metric space into the fattened orbit of w_r."""
    space = urysohn.space_from_json(load_json(space_source))
    payload = urysohn.embedding_to_json(urysohn.embed_metric(space, r))
    payload['space'] = urysohn.space_to_json(space)
    emit(payload, fmt, decimal)


@bp.cli.command('ramsey')
@click.argument('instance_source')
@output_options
@handle_errors
def ramsey(instance_source, fmt, decimal):
    """Search a colouring for a monochromatic coarsening family."""
    table, m = dualramsey.instance_from_json(load_json(instance_source))
    witness = dualramsey.search_monochromatic(table, m)
    emit({'n': table.n, 'k': table.k, 'm': m, 'coloring': dualramsey.table_to_json(table),
          'witness': dualramsey.witness_to_json(witness)}, fmt, decimal)


@bp.cli.command('selftest')
@click.option('--seed', type=click.IntRange(min=0), default=None, help='Seed (defaults to OSCILLAB_SEED).')
@click.option('--cases', type=click.IntRange(min=0), default=None, help='Base case count per suite.')
@click.option('--suite', 'suites', multiple=True, type=click.Choice([name for name, _, _ in SUITES]),
              help='Run only the named suites.')
@output_options
@handle_errors
def selftest(seed, cases, suites, fmt, decimal):
    """Run every property suite; exit 1 on any violation."""
    config = current_app.config
    seed = config['SEED'] if seed is None else seed
    cases = config['CASE_COUNT'] if cases is None else cases
    report = run_selftest(seed, cases, only=list(suites) or None, max_den=config['MAX_DENOMINATOR'],
                          max_transient=config['MAX_TRANSIENT'], max_period=config['MAX_PERIOD'])
    emit(report.to_json(), fmt, decimal)
    if not report.passed:
        failed = [s.name for s in report.suites if not s.passed]
        raise ViolationError(f"property violations in {', '.join(failed)}")
