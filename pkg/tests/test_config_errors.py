import pytest

from config.config import Config
from config.errors import (EXIT_CERTIFICATE, EXIT_INPUT, EXIT_PRECONDITION, ConfigError, DepthTooSmall,
                           ErrorMessages, InequalityFails, Infeasible, MalformedInterval, PrefixTooLong)


@pytest.fixture
def isolated_env(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    for key in ('CONFIG', 'SEED', 'LOG_LEVEL', 'MAX_COMPONENTS', 'MATERIALIZE_LIMIT'):
        monkeypatch.delenv(f'BILIP_{key}', raising=False)
    return tmp_path


def test_defaults(isolated_env):
    settings = Config.load()
    assert settings == Config.DEFAULT_CONFIG
    assert Config.get_setting('max_components') == 200_000


def test_yaml_then_environment(isolated_env, monkeypatch):
    path = isolated_env / 'settings.yaml'
    path.write_text("seed: 7\nmax_components: 5000\nlog_level: INFO\n")
    monkeypatch.setenv('BILIP_MAX_COMPONENTS', '900')
    settings = Config.load(str(path))
    assert settings['seed'] == 7
    assert settings['max_components'] == 900
    assert Config.get_setting('log_level') == 'INFO'


def test_dotenv_file_is_read(isolated_env, monkeypatch):
    (isolated_env / '.env').write_text("BILIP_SEED=11\n")
    # Registered so teardown removes what the .env file sets
    monkeypatch.setenv('BILIP_SEED', '0')
    monkeypatch.delenv('BILIP_SEED')
    Config.load()
    assert Config.get_setting('seed') == 11


def test_config_path_from_environment(isolated_env, monkeypatch):
    path = isolated_env / 'other.yaml'
    path.write_text("plot_precision: 3\n")
    monkeypatch.setenv('BILIP_CONFIG', str(path))
    Config.load()
    assert Config.get_setting('plot_precision') == 3


@pytest.mark.parametrize('text', [
    "unknown_key: 1\n",
    "- just\n- a list\n",
    "seed: -1\n",
    "max_components: 0\n",
    "log_level: LOUD\n",
    "seed: [unclosed\n",
])
def test_bad_yaml_is_a_config_error(isolated_env, text):
    path = isolated_env / 'bad.yaml'
    path.write_text(text)
    with pytest.raises(ConfigError) as excinfo:
        Config.load(str(path))
    assert excinfo.value.exit_status == EXIT_INPUT


def test_bad_environment_value(isolated_env, monkeypatch):
    monkeypatch.setenv('BILIP_SEED', 'seven')
    with pytest.raises(ConfigError):
        Config.load()


def test_missing_config_file(isolated_env):
    with pytest.raises(ConfigError):
        Config.load(str(isolated_env / 'missing.yaml'))


def test_override_skips_none_and_rejects_unknown():
    Config.override(seed=None, max_components=10)
    assert Config.get_setting('seed') == 0
    assert Config.get_setting('max_components') == 10
    with pytest.raises(ConfigError):
        Config.override(colour='blue')
    Config.reset()
    assert Config.get_setting('max_components') == 200_000


def test_catalog_formats_shorthands_and_context():
    message = ErrorMessages.get_error('depth_too_small', depth=4, bound='10/1')
    assert message == "[precondition] Avoidance depth 4 has no row with k > C*L = 10/1."
    assert ErrorMessages.get_error('nope').startswith('[internal] An unknown error occurred')
    assert ErrorMessages.get_info('report_written', path='out.json') == "Report written to out.json."
    assert 'deeper rows' in ErrorMessages.get_warning('partial_materialization', set_depth=2, depth=5)


def test_exception_exit_statuses():
    assert MalformedInterval(lo=1, hi=0).exit_status == EXIT_INPUT
    assert PrefixTooLong(length=10, limit=5).exit_status == EXIT_PRECONDITION
    assert Infeasible(bound='1/2').exit_status == EXIT_CERTIFICATE
    assert InequalityFails(check='x', detail='y').exit_status == EXIT_CERTIFICATE


def test_exception_dict_form():
    error = DepthTooSmall(depth=4, bound='10/1')
    data = error.to_dict()
    assert data['error'] == 'DepthTooSmall'
    assert data['code'] == 'depth_too_small'
    assert data['context'] == {'depth': '4', 'bound': '10/1'}
    assert str(error) == data['message']
