import pytest

from errors import ConfigError
from services.config_parser import load_config, parse_config
from services.harness import build_feasible_set, build_stream, resolve_eta, stream_seed
from storage.models import Algorithm, DelayKind, EtaRule, OGDStep, SetKind, StreamKind


MINIMAL = """\
[problem]
set = box
dimension = 3

[losses]
kind = linear

[run]
algorithm = dofw_convex
T = 100
"""


def test_minimal_file_gets_defaults():
    config = parse_config(MINIMAL)
    assert config.problem.kind is SetKind.BOX
    assert config.problem.lo == [-1.0, -1.0, -1.0]
    assert config.problem.hi == [1.0, 1.0, 1.0]
    assert config.losses.kind is StreamKind.LINEAR
    assert config.losses.gradient_bound == 1.0
    assert config.delays.kind is DelayKind.FIXED
    assert config.delays.delay == 1
    assert config.run.algorithm is Algorithm.DOFW_CONVEX
    assert config.run.horizon == 100
    assert config.run.eta_rule is EtaRule.GENERAL
    assert config.run.ogd_step is OGDStep.CONSTANT
    assert config.run.base_seed == 0
    assert config.run.output is None


def test_comments_and_blank_lines_are_ignored(make_config):
    config = make_config(
        """
        # experimento de prueba
        [problem]
        set = l2ball   # bola
        dimension = 2
        radius = 2.5
        center = 1.0, -1.0

        [losses]
        kind = quadratic
        beta = 0.5

        [run]
        algorithm = dofw_sc
        T = 10
        """
    )
    assert config.problem.radius == 2.5
    assert config.problem.center == [1.0, -1.0]
    assert config.solver_beta == 0.5


def test_sc_algorithm_on_linear_stream_is_rejected():
    text = MINIMAL.replace("dofw_convex", "dofw_sc")
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    # linea de `algorithm = dofw_sc`
    assert info.value.line == 9
    assert "beta" in info.value.message


def test_unknown_key_names_the_key():
    text = MINIMAL + "delya = 3\n"
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert "delya" in str(info.value)
    assert info.value.line == 11
    assert str(info.value).startswith("line 11: ")


def test_unknown_section_rejected():
    with pytest.raises(ConfigError) as info:
        parse_config(MINIMAL + "[plots]\n")
    assert "plots" in info.value.message


def test_missing_required_key_points_at_section():
    text = MINIMAL.replace("T = 100\n", "")
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert "`T`" in info.value.message
    assert info.value.line == 8


def test_missing_section_rejected():
    with pytest.raises(ConfigError) as info:
        parse_config("[problem]\nset = box\ndimension = 2\n")
    assert "[losses]" in info.value.message


def test_type_error_reports_line():
    text = MINIMAL.replace("dimension = 3", "dimension = three")
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.line == 3
    assert "dimension" in info.value.message


def test_explicit_eta_rule():
    config = parse_config(MINIMAL + "eta_rule = explicit(0.05)\n")
    assert config.run.eta_rule is EtaRule.EXPLICIT
    assert config.run.eta == pytest.approx(0.05)


def test_eta_key_alone_selects_explicit_rule():
    config = parse_config(MINIMAL + "eta = 0.5\n")
    assert config.run.eta_rule is EtaRule.EXPLICIT
    assert config.run.eta == pytest.approx(0.5)

    box = build_feasible_set(config.problem)
    stream = build_stream(config.losses, box, config.run.horizon, stream_seed(config))
    assert resolve_eta(config, box, stream) == pytest.approx(0.5)


def test_eta_key_with_other_rule_rejected():
    with pytest.raises(ConfigError) as info:
        parse_config(MINIMAL + "eta_rule = general\neta = 0.5\n")
    assert info.value.line == 12
    assert "eta" in info.value.message


def test_eta_given_twice_rejected():
    with pytest.raises(ConfigError):
        parse_config(MINIMAL + "eta_rule = explicit(0.1)\neta = 0.5\n")


def test_G_on_quadratic_stream_rejected():
    text = MINIMAL.replace("kind = linear", "kind = quadratic\nG = 2.0")
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.line == 7
    assert "G" in info.value.message


def test_beta_on_linear_stream_rejected():
    text = MINIMAL.replace("kind = linear", "kind = linear\nbeta = 0.5")
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.line == 7
    assert "beta" in info.value.message


def test_explicit_rule_without_value_rejected():
    with pytest.raises(ConfigError):
        parse_config(MINIMAL + "eta_rule = explicit\n")


def test_uniform_delays_require_d_max():
    text = MINIMAL + "\n[delays]\nkind = uniform\n"
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert "d_max" in info.value.message
    assert info.value.line == 12


def test_delay_must_be_positive():
    text = MINIMAL + "\n[delays]\nkind = fixed\ndelay = 0\n"
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.line == 14


def test_box_vectors_broadcast_and_checked():
    text = MINIMAL.replace("dimension = 3", "dimension = 3\nlo = 0\nhi = 1, 2, 3")
    config = parse_config(text)
    assert config.problem.lo == [0.0, 0.0, 0.0]
    assert config.problem.hi == [1.0, 2.0, 3.0]

    with pytest.raises(ConfigError):
        parse_config(MINIMAL.replace("dimension = 3", "dimension = 3\nhi = 1, 2"))


def test_y1_length_checked():
    with pytest.raises(ConfigError):
        parse_config(MINIMAL + "y1 = 0, 0\n")


def test_run_beta_may_not_exceed_stream_modulus(make_config):
    with pytest.raises(ConfigError):
        make_config(
            """
            [problem]
            set = box
            dimension = 2
            [losses]
            kind = quadratic
            beta = 1.0
            [run]
            algorithm = dofw_sc
            T = 10
            beta = 2.0
            """
        )


def test_duplicate_key_rejected():
    with pytest.raises(ConfigError) as info:
        parse_config(MINIMAL + "T = 200\n")
    assert info.value.line == 11


def test_load_config_reads_file(tmp_path):
    path = tmp_path / "experiment.cfg"
    path.write_text(MINIMAL, encoding="utf-8")
    assert load_config(path).run.horizon == 100

    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.cfg")
