"""Scenario files and the command-line workflows."""

import json

import pytest

from silogame.cli import main
from silogame.errors import ConfigError
from silogame.scenario import dump_scenario, parse_scenario, parse_scenario_dict

from conftest import dilemma4, pin2, tiny2


def scenario_doc_tiny2(**extra):
    doc = {
        "game": {
            "n_orgs": 2, "local_iters": 1, "max_rounds": 2,
            "theta0": 1.0, "theta1": 1.0,
            "orgs": [
                {"unit_revenue": 3.0, "iter_cost": 0.1, "comm_cost": 0.1},
                {"unit_revenue": 4.0, "iter_cost": 0.2, "comm_cost": 0.1},
            ],
        },
    }
    doc.update(extra)
    return doc


def scenario_doc_pin2(**extra):
    doc = {
        "game": {
            "n_orgs": 2, "local_iters": 1, "max_rounds": 1,
            "theta0": 1.0, "theta1": 1.0,
            "orgs": [
                {"unit_revenue": 3.0, "iter_cost": 0.5, "comm_cost": 0.1},
                {"unit_revenue": 3.0, "iter_cost": 3.0, "comm_cost": 0.1},
            ],
        },
        "zd": {"phi": 0.2},
    }
    doc.update(extra)
    return doc


def write_scenario(tmp_path, doc, name="scenario.json") -> str:
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


class TestParsing:
    def test_minimal_defaults(self):
        s = parse_scenario_dict(scenario_doc_tiny2())
        assert s.game == tiny2()
        assert s.roster == ("RAND", "RAND")
        assert s.rounds == 20 and s.repeats == 100 and s.seed == 0
        assert s.zd.phi == 0.01
        assert s.out_dir == "out"

    def test_dump_is_idempotent(self):
        s1 = parse_scenario_dict(scenario_doc_tiny2())
        dumped = dump_scenario(s1)
        s2 = parse_scenario_dict(json.loads(dumped))
        assert s1 == s2
        assert dump_scenario(s2) == dumped

    def test_idempotent_with_sampled_orgs(self):
        doc = {
            "game": {"n_orgs": 10, "local_iters": 200, "max_rounds": 33,
                     "theta0": 23271.584, "theta1": 50193.243,
                     "orgs": {"sample": {"seed": 7}}},
            "zd": {"phi": 0.01},
        }
        s1 = parse_scenario_dict(doc)
        dumped = dump_scenario(s1)
        s2 = parse_scenario_dict(json.loads(dumped))
        assert s1 == s2
        assert dump_scenario(s2) == dumped
        assert len(s1.game.orgs) == 10

    def test_experiment_scale_scenario_accepted(self):
        doc = {
            "game": {"n_orgs": 10, "local_iters": 200, "max_rounds": 33,
                     "theta0": 23271.584, "theta1": 50193.243,
                     "orgs": {"sample": {"seed": 1}}},
            "roster": ["MMZD"] + ["RAND"] * 9,
            "zd": {"phi": 0.01},
        }
        s = parse_scenario_dict(doc)
        assert s.game.local_iters == 200
        assert s.zd.org == 0

    def test_zero_phi_names_the_field(self):
        with pytest.raises(ConfigError, match="zd.phi"):
            parse_scenario_dict(scenario_doc_tiny2(zd={"phi": 0}))

    def test_leader_must_be_member(self):
        doc = scenario_doc_tiny2(roster=["MMZDA", "MMZDA"],
                                 zd={"phi": 0.01, "leader": 5})
        with pytest.raises(ConfigError, match="zd.leader"):
            parse_scenario_dict(doc)

    def test_roster_length_checked(self):
        with pytest.raises(ConfigError, match="roster"):
            parse_scenario_dict(scenario_doc_tiny2(roster=["ALLD"]))

    def test_unknown_top_level_field(self):
        with pytest.raises(ConfigError, match="unknown"):
            parse_scenario_dict(scenario_doc_tiny2(extra_block={}))

    def test_org_field_diagnostics(self):
        doc = scenario_doc_tiny2()
        del doc["game"]["orgs"][0]["iter_cost"]
        with pytest.raises(ConfigError, match=r"game.orgs\[0\]"):
            parse_scenario_dict(doc)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            parse_scenario(tmp_path / "nope.json")


class TestCliCommands:
    def test_dilemma_on_dilemma4(self, tmp_path, capsys):
        doc = {
            "game": {"n_orgs": 4, "local_iters": 1, "max_rounds": 2,
                     "theta0": 100.0, "theta1": 100.0,
                     "orgs": [{"unit_revenue": 50.0, "iter_cost": 0.6,
                               "comm_cost": 0.05}] * 4},
        }
        path = write_scenario(tmp_path, doc)
        code = main(["dilemma", "--scenario", path, "--out", str(tmp_path / "o")])
        out = capsys.readouterr().out
        assert code == 0
        assert "(0, 0, 0, 0)" in out
        assert "free-riding condition holds for all orgs: True" in out
        assert (tmp_path / "o" / "scenario.normalized.json").exists()

    def test_dilemma_skips_equilibria_at_scale(self, tmp_path, capsys):
        doc = {"game": {"n_orgs": 10, "local_iters": 200, "max_rounds": 33,
                        "theta0": 23271.584, "theta1": 50193.243,
                        "orgs": {"sample": {"seed": 3}}}}
        path = write_scenario(tmp_path, doc)
        code = main(["dilemma", "--scenario", path, "--out", str(tmp_path / "o")])
        out = capsys.readouterr().out
        assert code == 0
        assert "skipped" in out

    def test_synthesize_feasible_writes_strategy(self, tmp_path, capsys):
        path = write_scenario(tmp_path, scenario_doc_pin2())
        out_dir = tmp_path / "syn"
        code = main(["synthesize", "--scenario", path, "--out", str(out_dir)])
        assert code == 0
        table = (out_dir / "strategy.csv").read_text().splitlines()
        assert table[0] == "state,y_1,y_2,p_0,p_1"
        assert len(table) == 5
        for line in table[1:]:
            probs = [float(x) for x in line.split(",")[3:]]
            assert all(-1e-12 <= p <= 1 + 1e-12 for p in probs)

    def test_synthesize_alpha0_override(self, tmp_path, capsys):
        # enforce a welfare inside the feasible interval, not the maximum
        doc = scenario_doc_pin2(zd={"phi": 0.2, "alpha0": -0.1})
        path = write_scenario(tmp_path, doc)
        code = main(["synthesize", "--scenario", path,
                     "--out", str(tmp_path / "o")])
        assert code == 0
        out = capsys.readouterr().out
        assert "enforced welfare" in out

        bad = scenario_doc_pin2(zd={"phi": 0.2, "alpha0": 99.0})
        path = write_scenario(tmp_path, bad, "bad.json")
        assert main(["synthesize", "--scenario", path,
                     "--out", str(tmp_path / "o2")]) == 2

    def test_synthesize_infeasible_exit_code(self, tmp_path, capsys):
        path = write_scenario(tmp_path, scenario_doc_tiny2(zd={"phi": 0.01}))
        code = main(["synthesize", "--scenario", path,
                     "--out", str(tmp_path / "o")])
        out = capsys.readouterr().out
        assert code == 3
        assert "gap" in out

    def test_simulate_reproducible_byte_identical(self, tmp_path):
        doc = scenario_doc_tiny2(
            roster=["RAND", "TFT"],
            experiment={"rounds": 50, "seed": 11})
        path = write_scenario(tmp_path, doc)
        assert main(["simulate", "--scenario", path,
                     "--out", str(tmp_path / "a")]) == 0
        assert main(["simulate", "--scenario", path,
                     "--out", str(tmp_path / "b")]) == 0
        a = (tmp_path / "a" / "trace.csv").read_bytes()
        b = (tmp_path / "b" / "trace.csv").read_bytes()
        assert a == b
        assert a.splitlines()[0] == b"round,y_1,y_2,welfare,running_mean"

    def test_simulate_constant_welfare_for_allc(self, tmp_path):
        doc = scenario_doc_tiny2(roster=["ALLC", "ALLC"],
                                 experiment={"rounds": 10, "seed": 1})
        path = write_scenario(tmp_path, doc)
        assert main(["simulate", "--scenario", path,
                     "--out", str(tmp_path / "o")]) == 0
        rows = (tmp_path / "o" / "trace.csv").read_text().splitlines()[1:]
        welfare = {row.split(",")[3] for row in rows}
        assert len(welfare) == 1

    def test_simulate_feasible_pin_tracks_target(self, tmp_path, capsys):
        doc = scenario_doc_pin2(roster=["MMZD", "RAND"],
                                experiment={"rounds": 4000, "seed": 5})
        path = write_scenario(tmp_path, doc)
        code = main(["simulate", "--scenario", path, "--out",
                     str(tmp_path / "o"), "--svg"])
        assert code == 0
        assert (tmp_path / "o" / "trace.svg").exists()
        rows = (tmp_path / "o" / "trace.csv").read_text().splitlines()[1:]
        final_mean = float(rows[-1].split(",")[-1])
        assert abs(final_mean - 0.3) < 0.1

    def test_simulate_infeasible_pin_refused(self, tmp_path, capsys):
        doc = scenario_doc_tiny2(roster=["MMZD", "RAND"],
                                 zd={"phi": 0.01})
        path = write_scenario(tmp_path, doc)
        code = main(["simulate", "--scenario", path, "--out", str(tmp_path / "o")])
        assert code == 3

    def test_sweep_alliance_size_monotone_column(self, tmp_path):
        doc = {
            "game": {"n_orgs": 4, "local_iters": 1, "max_rounds": 2,
                     "theta0": 100.0, "theta1": 100.0,
                     "orgs": [{"unit_revenue": 50.0, "iter_cost": 0.6,
                               "comm_cost": 0.05}] * 4},
            "experiment": {"seed": 2,
                           "sweep": {"axis": "alliance_size",
                                     "sizes": [1, 2, 3, 4], "draws": 5,
                                     "nested": True}},
        }
        path = write_scenario(tmp_path, doc)
        assert main(["sweep", "--scenario", path, "--out",
                     str(tmp_path / "o"), "--svg"]) == 0
        rows = (tmp_path / "o" / "sweep.csv").read_text().splitlines()
        assert rows[0] == ("alliance_size,absolute_max_mean,absolute_max_se,"
                           "relative_max_mean,relative_max_se,draws")
        values = [float(r.split(",")[1]) for r in rows[1:]]
        assert values == sorted(values)
        assert (tmp_path / "o" / "sweep.svg").exists()

    def test_sweep_reproducible(self, tmp_path):
        doc = {
            "game": {"n_orgs": 4, "local_iters": 1, "max_rounds": 2,
                     "theta0": 100.0, "theta1": 100.0,
                     "orgs": [{"unit_revenue": 50.0, "iter_cost": 0.6,
                               "comm_cost": 0.05}] * 4},
            "experiment": {"seed": 2,
                           "sweep": {"axis": "alliance_size",
                                     "sizes": [1, 2, 3], "draws": 4}},
        }
        path = write_scenario(tmp_path, doc)
        assert main(["sweep", "--scenario", path, "--out", str(tmp_path / "a")]) == 0
        assert main(["sweep", "--scenario", path, "--out", str(tmp_path / "b")]) == 0
        assert ((tmp_path / "a" / "sweep.csv").read_bytes()
                == (tmp_path / "b" / "sweep.csv").read_bytes())

    def test_sweep_without_block_is_config_error(self, tmp_path):
        path = write_scenario(tmp_path, scenario_doc_tiny2())
        assert main(["sweep", "--scenario", path, "--out", str(tmp_path / "o")]) == 2

    def test_empty_sizes_rejected(self, tmp_path):
        doc = scenario_doc_tiny2(
            experiment={"sweep": {"axis": "alliance_size", "sizes": []}})
        path = write_scenario(tmp_path, doc)
        assert main(["sweep", "--scenario", path, "--out", str(tmp_path / "o")]) == 2

    def test_malformed_json_exit_code(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        assert main(["dilemma", "--scenario", str(path)]) == 2

    def test_seed_override_changes_trace(self, tmp_path):
        doc = scenario_doc_tiny2(roster=["RAND", "RAND"],
                                 experiment={"rounds": 30, "seed": 1})
        path = write_scenario(tmp_path, doc)
        main(["simulate", "--scenario", path, "--out", str(tmp_path / "a")])
        main(["simulate", "--scenario", path, "--out", str(tmp_path / "b"),
              "--seed", "2"])
        assert ((tmp_path / "a" / "trace.csv").read_bytes()
                != (tmp_path / "b" / "trace.csv").read_bytes())
        echoed = json.loads((tmp_path / "b" / "scenario.normalized.json").read_text())
        assert echoed["experiment"]["seed"] == 2
