import json
from fractions import Fraction

import pytest

from app.services import dualramsey, ellinf, urysohn
from app.services.rigidsurj import apply, ea_from_json
from app.services.seqcore import (
    OMEGA, EPSeq, UPoint, format_rational, parse_rational, seq_from_json, seq_to_json, sup_abs,
)

F = Fraction


def run_json(runner, args):
    result = runner.invoke(args=args)
    assert result.exit_code == 0, result.output
    return json.loads(result.output)


def test_xk_prints_exact_entries(runner):
    out = run_json(runner, ['xk', '2'])
    assert out['k'] == 2
    assert out['x']['transient'] == ["0/1", "1/2", "-1/2", "1/1", "-1/1", "1/2", "-1/2"]
    assert out['x']['period'] == ["0/1"]


def test_xk_rejects_zero(runner):
    result = runner.invoke(args=['xk', '0'])
    assert result.exit_code == 2
    assert "k must be a positive integer" in result.output


def test_h_table(runner):
    out = run_json(runner, ['h', '1'])
    rows = {row['u']: row['h'] for row in out['table']}
    assert rows["1/2"] == "0/1"
    assert rows["3/4"] == "1/1"
    assert rows["-1/1"] == "-1/1"


def test_udist_on_equal_inputs(runner):
    x = json.dumps({'transient': ["9/10", "1/5"], 'period': ["0"]})
    out = run_json(runner, ['udist', x, x])
    assert out['d'] == "0/1"
    assert out['case'] == "equal"


def test_udist_reads_files(runner, tmp_path):
    x_file, y_file = tmp_path / "x.json", tmp_path / "y.json"
    x_file.write_text(json.dumps({'transient': ["9/10", "1/5"], 'period': ["0/1"]}), encoding="utf-8")
    y_file.write_text(json.dumps({'transient': ["1/2", "1/10"], 'period': ["0/1"]}), encoding="utf-8")
    out = run_json(runner, ['udist', str(x_file), str(y_file)])
    assert out == {
        'd': "2/5", 'crossing': 1, 'case': "m_constant", 'witness_t': "10/11",
        'bounds': {
            'crossing': {'m': "2/5", 'M': "3/10", 'n': 1},
            'omega': {'m': "2/5", 'M': "0/1", 'n': "ω"},
        },
    }


def test_udist_bounds_match_the_service(runner):
    x = UPoint.of([F(1, 3), 1], [0])
    y = UPoint.of([1, F(1, 4), F(1, 2)], [0])
    out = run_json(runner, ['udist', json.dumps(seq_to_json(x)), json.dumps(seq_to_json(y))])
    result = urysohn.dist(x, y)
    assert out['d'] == format_rational(result.d)
    assert out['bounds']['crossing'] == urysohn.bounds_to_json(urysohn.prefix_bounds(x, y, result.crossing))
    assert out['bounds']['omega'] == urysohn.bounds_to_json(urysohn.prefix_bounds(x, y, OMEGA))


def test_udist_rejects_points_outside_the_sphere(runner):
    bad = json.dumps({'transient': ["3/2"], 'period': ["0"]})
    result = runner.invoke(args=['udist', bad, bad])
    assert result.exit_code == 2


def test_missing_input_file_is_an_input_error(runner, tmp_path):
    result = runner.invoke(args=['udist', str(tmp_path / "nope.json"), str(tmp_path / "nope.json")])
    assert result.exit_code == 2


def test_approx_certificate(runner):
    a = json.dumps({'transient': ["-1"], 'period': ["0"]})
    out = run_json(runner, ['approx', a, '1'])
    assert out['bound'] == "2/1"
    assert out['intermediate'] == "1/1"
    # p = (0, 0, 1, 2, ...): x_1∘p = S(x_1)
    assert out['p'] == {'prefix': [0], 'tail_offset': 1}


@pytest.mark.parametrize("transient, k", [
    (["-1"], 1),
    (["1", "-1/2", "0", "1/3"], 2),
    (["1/4", "-1"], 3),
])
def test_approx_output_reads_back(runner, transient, k):
    a = EPSeq.of(transient, ["0"])
    out = run_json(runner, ['approx', json.dumps(seq_to_json(a)), str(k)])
    cert = ellinf.approximate_in_orbit(a, k)
    p = ea_from_json(out['p'])
    assert p == cert.p
    assert parse_rational(out['distance']) == cert.distance
    assert sup_abs(ellinf.embed_T(a, k) - apply(ellinf.make_xk(k).seq, p)) == cert.distance


@pytest.mark.parametrize("k", [1, 2, 5])
def test_xk_output_reads_back(runner, k):
    out = run_json(runner, ['xk', str(k)])
    assert seq_from_json(out['x']) == ellinf.make_xk(k).seq


@pytest.mark.parametrize("r", [1, 3, 4])
def test_wr_output_reads_back(runner, r):
    out = run_json(runner, ['wr', str(r)])
    assert seq_from_json(out['w'], cls=UPoint) == urysohn.make_wr(r)


def test_wr_and_embed(runner):
    out = run_json(runner, ['wr', '3'])
    assert out['w']['transient'] == ["1/1", "2/3", "1/3"]
    space = json.dumps({'points': ["A", "B"], 'dist': [["0", "1/2"], ["1/2", "0"]]})
    out = run_json(runner, ['embed', space, '2'])
    assert [pt['name'] for pt in out['points']] == ["A", "B"]
    assert out['points'][0]['membership_distance'] == "0/1"


def test_embed_output_reads_back(runner):
    data = {'points': ["A", "B", "C"], 'dist': [["0", "1/2", "1"], ["1/2", "0", "1/2"], ["1", "1/2", "0"]]}
    out = run_json(runner, ['embed', json.dumps(data), '2'])
    space = urysohn.space_from_json(data)
    report = urysohn.embed_metric(space, 2)
    assert urysohn.space_from_json(out['space']) == space
    assert out['space'] == urysohn.space_to_json(space)
    for pt, expected in zip(out['points'], report.points):
        assert seq_from_json(pt['f'], cls=UPoint) == expected.f
        assert ea_from_json(pt['p']) == expected.p
        assert parse_rational(pt['membership_distance']) == expected.membership_distance
    assert len(out['points']) == len(report.points) == 3


def test_ramsey_instance(runner):
    instance = json.dumps({'n': 4, 'k': 2, 'm': 3,
                           'coloring': {'kind': 'position_mod', 'position': 3, 'modulus': 2}})
    out = run_json(runner, ['ramsey', instance])
    assert out['witness'] == {'p': {'values': [0, 1, 2, 0]}, 'color': 0}
    assert out['coloring']['kind'] == "table"
    assert len(out['coloring']['entries']) == 7


def test_ramsey_coloring_reads_back(runner):
    data = {'n': 4, 'k': 2, 'm': 3, 'coloring': {'kind': 'position_mod', 'position': 3, 'modulus': 2}}
    out = run_json(runner, ['ramsey', json.dumps(data)])
    table, m = dualramsey.instance_from_json(data)
    again, _ = dualramsey.instance_from_json({'n': 4, 'k': 2, 'm': 3, 'coloring': out['coloring']})
    assert again.colors == table.colors
    assert dualramsey.witness_to_json(dualramsey.search_monochromatic(again, m)) == out['witness']


def test_ramsey_on_the_xk_orbit(runner):
    instance = {'n': 3, 'k': 1, 'm': 2,
                'coloring': {'kind': 'xk_orbit', 'target': seq_to_json(ellinf.make_xk(2).seq),
                             'xk': 2, 'buckets': 4}}
    out = run_json(runner, ['ramsey', json.dumps(instance)])
    assert out['coloring']['entries'] == [{'values': [0, 0, 0], 'color': 1}]
    assert out['witness']['color'] == 1


def test_ramsey_rejects_an_empty_fattening(runner):
    instance = {'n': 3, 'k': 3, 'm': 3, 'coloring': {'kind': 'xk_fattening', 'centers': [], 'xk': 2, 'eps': "1/2"}}
    result = runner.invoke(args=['ramsey', json.dumps(instance)])
    assert result.exit_code == 2


def test_table_format_and_decimals(runner):
    result = runner.invoke(args=['wr', '3', '--format', 'table', '--decimal'])
    assert result.exit_code == 0
    assert "w.transient[1]  2/3  (~0.666667, non-authoritative)" in result.output


def test_json_decimals_are_kept_apart(runner):
    out = run_json(runner, ['wr', '2', '--decimal'])
    assert out['result']['w']['transient'] == ["1/1", "1/2"]
    assert out['approx_non_authoritative']['w.transient[1]'] == "0.500000"


def test_selftest_is_deterministic(runner):
    first = runner.invoke(args=['selftest', '--seed', '0', '--cases', '10'])
    second = runner.invoke(args=['selftest', '--seed', '0', '--cases', '10'])
    assert first.exit_code == 0, first.output
    assert first.output == second.output
    report = json.loads(first.output)
    assert report['seed'] == 0 and report['passed']


def test_selftest_defaults_come_from_config(runner, app):
    out = run_json(runner, ['selftest', '--suite', 'witness'])
    assert out['seed'] == app.config['SEED']
    assert out['cases'] == app.config['CASE_COUNT']
    assert [s['name'] for s in out['suites']] == ['witness']
