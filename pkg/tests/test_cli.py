import math

import pytest

from config.experiment import CONFIG_KEYS, HEADER_EXCLUDED, ExperimentConfig, parse_config
from main import EXIT_OK, EXIT_USAGE, main
from src.exceptions import ConfigError, SchemaError
from src.models import RoundReport
from src.reporting import SUMMARY, MetricsWriter, compare, read_config, read_metrics, reports_to_frame
from src.runner import ExperimentRunner, parse_sweep, sweep_path

TINY = ['--users', '2', '--cycles', '2', '--local-epochs', '1', '--synthetic-records', '400', '--batch-size', '64']


def simulate(out, *extra):
    return main(['simulate', '--scheme', 'fl', *TINY, '--out', str(out), *extra])


class TestParseConfig:
    def test_scheme_defaults(self):
        fl = parse_config({'scheme': 'fl'})
        assert (fl.users, fl.cycles, fl.local_epochs) == (3, 7, 5)
        sl = parse_config({'scheme': 'sl'})
        assert (sl.users, sl.cycles) == (1, 50)
        assert parse_config({'scheme': 'cl'}).users == 3

    def test_text_preset_lengthens_fl(self):
        assert parse_config({'scheme': 'fl', 'preset': 'text'}).cycles == 50

    def test_invalid_bit_width(self):
        with pytest.raises(ConfigError):
            parse_config({'quant_bits': '3'})

    def test_unknown_key(self):
        with pytest.raises(ConfigError):
            parse_config({'snr': '5'})

    def test_flags_override_file(self, tmp_path):
        path = tmp_path / 'run.cfg'
        path.write_text('# desk run\nsnr_db = 5\nusers=2\n', encoding='utf-8')
        cfg = parse_config({'snr_db': '10', 'users': None}, path)
        assert cfg.snr_db == 10.0
        assert cfg.users == 2

    def test_infinite_snr(self):
        assert math.isinf(parse_config({'snr_db': 'inf'}).snr_db)

    def test_bool_and_optional_values(self):
        cfg = parse_config({'privacy': 'true', 'max_records': 'none'})
        assert cfg.privacy is True and cfg.max_records is None

    def test_header_roundtrip(self):
        cfg = parse_config({'scheme': 'sl', 'snr_db': '7.5', 'privacy': 'yes', 'out': 'x.csv'})
        restored = ExperimentConfig.from_header(cfg.to_header())
        assert restored == cfg.replace(out='metrics.csv')
        keys = [item.split('=', 1)[0] for item in cfg.to_header().split(';')]
        assert 'out' not in keys
        assert set(keys) == set(CONFIG_KEYS) - set(HEADER_EXCLUDED)


class TestSweep:
    def test_parse(self):
        assert parse_sweep(['snr_db=0, 5', 'quant_bits=4']) == [('snr_db', ['0', '5']), ('quant_bits', ['4'])]

    def test_parse_rejects_unknown_key(self):
        with pytest.raises(ConfigError):
            parse_sweep(['bogus=1'])

    def test_scheme_axis_resolves_each_schemes_defaults(self, monkeypatch):
        seen = []
        runner = ExperimentRunner()
        monkeypatch.setattr(runner, 'run', lambda config: seen.append(config) or 0)
        runner.sweep(parse_config({'scheme': 'cl'}), [('scheme', ['fl', 'sl'])])
        assert [(c.scheme, c.users, c.cycles, c.local_epochs) for c in seen] == [('fl', 3, 7, 5), ('sl', 1, 50, 1)]

    def test_explicit_users_survive_scheme_change(self):
        cfg = parse_config({'scheme': 'fl', 'users': '5'}).replace(scheme='cl')
        assert cfg.users == 5 and cfg.cycles == 50

    def test_preset_change_reresolves_cycles(self):
        assert parse_config({'scheme': 'fl'}).replace(preset='text').cycles == 50

    def test_file_naming(self):
        assert sweep_path('out/metrics.csv', [('snr_db', '5'), ('quant_bits', '4')]) == \
            'out/metrics_snr_db=5_quant_bits=4.csv'


class TestMetricsFile:
    @staticmethod
    def reports():
        return [
            RoundReport(scheme='fl', cycle=1, train_loss=0.7, test_accuracy=0.6, uplink_bits=100, comm_energy_j=0.5),
            RoundReport(scheme='fl', cycle=2, train_loss=0.5, test_accuracy=0.8, uplink_bits=100, comm_energy_j=0.25,
                        recon_error=0.03),
        ]

    def test_summary_row(self):
        frame = reports_to_frame(self.reports(), ExperimentConfig())
        summary = frame.iloc[-1]
        assert summary['cycle'] == SUMMARY
        assert summary['uplink_bits'] == 200
        assert summary['comm_energy_j'] == pytest.approx(0.75)
        assert summary['accuracy'] == pytest.approx(0.8)
        assert summary['recon_error'] == pytest.approx(0.03)

    def test_write_and_read(self, tmp_path):
        path = MetricsWriter(tmp_path / 'nested' / 'm.csv').write(self.reports(), ExperimentConfig(seed=3))
        lines = path.read_text(encoding='utf-8').splitlines()
        assert lines[0] == '# schema: wlsim-metrics/v1'
        assert lines[1].startswith('# config: scheme=fl;')
        assert len(lines) == 2 + 1 + 2 + 1
        _, frame = read_metrics(path)
        assert list(frame['cycle']) == ['1', '2', SUMMARY]
        assert read_config(path).seed == 3

    def test_compare(self, tmp_path):
        path = MetricsWriter(tmp_path / 'm.csv').write(self.reports(), ExperimentConfig())
        row = compare([path]).iloc[0]
        assert row['total_bits'] == 200
        assert row['final_accuracy'] == pytest.approx(0.8)
        assert row['total_energy_j'] == pytest.approx(0.75)

    def test_compare_aggregates_seeds_per_scheme(self, tmp_path):
        fl_a = MetricsWriter(tmp_path / 'fl_0.csv').write(self.reports(), ExperimentConfig(seed=0))
        other = [RoundReport(scheme='fl', cycle=1, train_loss=0.6, test_accuracy=0.7, uplink_bits=300,
                             recon_error=0.05)]
        fl_b = MetricsWriter(tmp_path / 'fl_1.csv').write(other, ExperimentConfig(seed=1))
        cl = [RoundReport(scheme='cl', cycle=1, train_loss=0.5, test_accuracy=0.9, uplink_bits=50)]
        cl_path = MetricsWriter(tmp_path / 'cl_0.csv').write(cl, ExperimentConfig(scheme='cl'))
        table = compare([fl_a, cl_path, fl_b]).set_index('scheme')
        assert list(table.index) == ['fl', 'cl']
        assert table.loc['fl', 'runs'] == 2 and table.loc['cl', 'runs'] == 1
        assert table.loc['fl', 'final_accuracy'] == pytest.approx(0.75)
        assert table.loc['fl', 'final_accuracy_std'] == pytest.approx(0.05)
        assert table.loc['fl', 'total_bits'] == pytest.approx(250)
        assert table.loc['fl', 'recon_error'] == pytest.approx(0.04)
        assert table.loc['cl', 'total_bits_std'] == 0.0

    def test_bad_schema(self, tmp_path):
        path = tmp_path / 'bad.csv'
        path.write_text('# schema: other/v9\n# config: \nscheme\nfl\n', encoding='utf-8')
        with pytest.raises(SchemaError):
            read_metrics(path)

    def test_missing_column(self, tmp_path):
        path = tmp_path / 'cut.csv'
        path.write_text('# schema: wlsim-metrics/v1\n# config: \nscheme,cycle\nfl,1\n', encoding='utf-8')
        with pytest.raises(SchemaError):
            read_metrics(path)


class TestMain:
    def test_simulate_writes_rows(self, tmp_path):
        out = tmp_path / 'fl.csv'
        assert simulate(out) == EXIT_OK
        lines = out.read_text(encoding='utf-8').splitlines()
        assert len(lines) == 2 + 1 + 2 + 1
        assert lines[-1].split(',')[2] == SUMMARY

    def test_reruns_are_byte_identical(self, tmp_path):
        simulate(tmp_path / 'a.csv')
        simulate(tmp_path / 'b.csv')
        assert (tmp_path / 'a.csv').read_bytes() == (tmp_path / 'b.csv').read_bytes()

    def test_replay_is_byte_identical(self, tmp_path):
        simulate(tmp_path / 'a.csv', '--snr-db', '10')
        assert main(['replay', str(tmp_path / 'a.csv'), '--out', str(tmp_path / 'r.csv')]) == EXIT_OK
        assert (tmp_path / 'a.csv').read_bytes() == (tmp_path / 'r.csv').read_bytes()

    def test_sweep_writes_one_file_per_point(self, tmp_path):
        out = tmp_path / 'm.csv'
        code = main(['simulate', '--scheme', 'fl', '--users', '1', '--cycles', '1', '--local-epochs', '1',
                     '--synthetic-records', '300', '--out', str(out),
                     '--sweep', 'snr_db=5,10', '--sweep', 'quant_bits=4,8'])
        assert code == EXIT_OK
        names = sorted(p.name for p in tmp_path.glob('m_*.csv'))
        assert names == ['m_snr_db=10_quant_bits=4.csv', 'm_snr_db=10_quant_bits=8.csv',
                         'm_snr_db=5_quant_bits=4.csv', 'm_snr_db=5_quant_bits=8.csv']

    def test_bad_config_is_usage_error(self, tmp_path):
        assert main(['simulate', '--quant-bits', '3', '--out', str(tmp_path / 'x.csv')]) == EXIT_USAGE

    def test_compare_prints_table(self, tmp_path, capsys):
        simulate(tmp_path / 'a.csv')
        capsys.readouterr()
        assert main(['compare', str(tmp_path / 'a.csv')]) == EXIT_OK
        out = capsys.readouterr().out
        assert 'total_bits' in out and 'fl' in out

    def test_compare_rejects_foreign_file(self, tmp_path):
        path = tmp_path / 'foreign.csv'
        path.write_text('a,b\n1,2\n', encoding='utf-8')
        assert main(['compare', str(path)]) == EXIT_USAGE

    def test_ber(self, capsys):
        assert main(['ber', '--snr-db', '0', '--bits', '200000', '--fading', 'none']) == EXIT_OK
        out = capsys.readouterr().out
        assert 'theory=7.86496' in out
        empirical = float(out.split('ber=')[1].split()[0])
        assert empirical == pytest.approx(0.0786496, rel=0.05)
