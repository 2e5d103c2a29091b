"""Collection of tests for sweep configurations."""
import json
import os
import warnings

from gtaon.exceptions import ConfigError, DuplicateTestCountWarning
from gtaon.harness import config as config_module
from gtaon.harness.config import SweepConfig


class TestSweepConfig:
    """Class for tests."""

    def setup_method(self):
        self.config = SweepConfig(p=1024, k="4", betas="0.5:1.0:0.25",
                                  trials=10, seed=3)

    def test_cells(self):
        assert(self.config.betas == (0.5, 0.75, 1.0))
        assert(self.config.k_value == 4)
        cells = self.config.cells()
        assert([c.n for c in cells] == [16, 24, 32])
        assert([c.cell_id for c in cells] == [0, 1, 2])
        summary = self.config.summary()
        assert(summary["k"] == 4 and summary["k_bar"] == 4)
        assert(len(summary["cells"]) == 3)

    def test_k_rule(self):
        config = SweepConfig(p=10 ** 5, k="ceil(p^0.7)", betas=0.5)
        assert(config.k_value == 3163)
        assert(config.betas == (0.5,))
        assert(config.params.k == 3163)

    def test_column_zeroed(self):
        config = SweepConfig(p=200, k=5, betas=[1.0],
                             design="column_zeroed", alpha_prime=0.5)
        assert(config.k_bar == 3)
        assert(config.to_json()["alpha_prime"] == 0.5)

    def test_duplicate_test_counts(self):
        config = SweepConfig(p=16, k="8", betas=[0.5, 0.55])
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            cells = config.cells()
        assert(cells[0].n == cells[1].n == 4)
        assert(any(issubclass(w.category, DuplicateTestCountWarning)
                   for w in caught))

    def test_invalid(self):
        bad = [
            dict(p=1024, k="4", betas=[1.0, 0.5]),
            dict(p=1024, k="4", betas=[0.5, 0.5]),
            dict(p=1024, k="4", betas=[]),
            dict(p=1024, k="4", betas=[-0.5]),
            dict(p=4, k="5", betas=[1.0]),
            dict(p=1024, k="4", betas=[1.0], design="hypercube"),
            dict(p=1024, k="4", betas=[1.0], design="saffron"),
            dict(p=1024, k="4", betas=[1.0], design="column_zeroed"),
            dict(p=1024, k="4", betas=[1.0], design="column_zeroed",
                 alpha_prime=1.0),
            dict(p=1024, k="4", betas=[1.0], decoder="bp"),
            dict(p=1024, k="4", betas=[1.0], detector="covered",
                 design="all_or_none"),
            dict(p=1024, k="4", betas=[1.0], detector="trivial"),
            dict(p=1024, k="4", betas=[1.0], trials=0),
            dict(p=1024, k="4", betas=[1.0], seed=-1),
            dict(p=1024, k="4", betas=[1.0], alpha=1.5),
            dict(p=1024, k="4", betas=[1.0], workers=0),
            dict(p=1024, k="p / 3", betas=[1.0]),
            dict(p=1024, k="4", betas="1:0:0.1"),
            dict(p=1024, k="4", betas=[1.0], dd_blocks=0),
            dict(p=10, k="6", betas=[1.0], dd_blocks=1),
        ]
        for kwargs in bad:
            try:
                SweepConfig(**kwargs)
                raise ValueError("Error was not caught!")
            except ConfigError:
                pass

    def test_json(self):
        j_data = self.config.to_json()
        assert(j_data["betas"] == [0.5, 0.75, 1.0])
        assert("alpha_prime" not in j_data)
        assert(SweepConfig.from_json(j_data) == self.config)

        j_data["note"] = "kept"
        config = SweepConfig.from_json(j_data)
        assert(config.extra == {"note": "kept"})
        assert(config == self.config)

        try:
            SweepConfig.from_json({"p": 10, "k": "2"})
            raise ValueError("Error was not caught!")
        except ConfigError:
            pass

    def test_dd_blocks(self):
        config = self.config.replace(dd_blocks=3)
        assert(config.dd_blocks == 3)
        assert(config.to_json()["dd_blocks"] == 3)
        assert(SweepConfig.from_json(config.to_json()) == config)
        assert(config != self.config)

    def test_k_rule_parsed_once(self, monkeypatch):
        config = SweepConfig(p=10 ** 5, k="ceil(p^0.7)", betas=0.5)

        def fail(text):
            raise AssertionError("k-rule parsed again")

        monkeypatch.setattr(config_module, "parse_k_rule", fail)
        assert(config.k_value == 3163)
        assert(config.params.k == 3163)

    def test_replace(self):
        config = self.config.replace(trials=20, output="out.csv")
        assert(config.trials == 20)
        assert(config.output == "out.csv")
        assert(config.betas == self.config.betas)

    def test_export_load(self, tmp_path):
        filename = os.path.join(str(tmp_path), "sweep.json")
        self.config.export(filename)
        assert(SweepConfig.load(filename) == self.config)

    def test_load_toml(self, tmp_path):
        filename = os.path.join(str(tmp_path), "sweep.toml")
        with open(filename, "w") as f:
            f.write(
                "[sweep]\n"
                "p = 1024\n"
                "k = \"4\"\n"
                "betas = \"0.5:1.0:0.25\"\n"
                "trials = 10\n"
                "seed = 3\n")
        assert(SweepConfig.load(filename) == self.config)

        flat = os.path.join(str(tmp_path), "flat.toml")
        with open(flat, "w") as f:
            f.write("p = 1024\nk = 4\nbetas = [0.5, 0.75, 1.0]\n"
                    "trials = 10\nseed = 3\n")
        assert(SweepConfig.load(flat) == self.config)

    def test_load_errors(self, tmp_path):
        try:
            SweepConfig.load(os.path.join(str(tmp_path), "missing.json"))
            raise ValueError("Error was not caught!")
        except ConfigError:
            pass

        bad_json = os.path.join(str(tmp_path), "bad.json")
        with open(bad_json, "w") as f:
            f.write("{p: 1")
        try:
            SweepConfig.load(bad_json)
            raise ValueError("Error was not caught!")
        except ConfigError:
            pass

        bad_toml = os.path.join(str(tmp_path), "bad.toml")
        with open(bad_toml, "w") as f:
            f.write("p = = 1\n")
        try:
            SweepConfig.load(bad_toml)
            raise ValueError("Error was not caught!")
        except ConfigError:
            pass

        bad_keys = os.path.join(str(tmp_path), "keys.json")
        with open(bad_keys, "w") as f:
            json.dump({"p": 1024, "betas": [1.0]}, f)
        try:
            SweepConfig.load(bad_keys)
            raise ValueError("Error was not caught!")
        except ConfigError:
            pass
