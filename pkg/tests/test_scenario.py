import pytest

from carrier_forge.scenario import ScenarioError, load_scenario, parse_scenario

BASE = """
[signal]
p_db = -12.0

[[carriers]]
label = "A"
rs_mbauds = 100.0
rolloff = 0.2
power_fraction = 0.5

[[carriers]]
label = "B"
rs_mbauds = 80.0
rolloff = 0.35
power_fraction = 0.5
"""


def test_table1_file(table1):
    assert [c.label for c in table1.carriers] == ["C1", "C2", "C3"]
    assert [c.symbol_rate for c in table1.carriers] == [120.48, 120.48, 180.72]
    assert [c.rolloff for c in table1.carriers] == [0.3, 0.2, 0.1]
    assert sum(c.power_fraction for c in table1.carriers) == pytest.approx(1.0)
    assert table1.p_db == -15.0 and table1.omux_bandwidth_mhz == 500.0


def test_defaults():
    sc = parse_scenario(BASE)
    assert sc.p_db == -12.0 and sc.L == 10 and sc.seeds == (1,)
    assert sc.constellation == "QPSK" and sc.expansion_point == 0.0


def test_numerics_and_seeds():
    sc = parse_scenario(BASE + "\n[numerics]\nL = 6\nK = 48\nOSF = 32\nseeds = [3, 4]\nn_symbols = 50000\n")
    assert (sc.L, sc.truncation_span, sc.oversampling, sc.seeds, sc.n_symbols) == (6, 48, 32, (3, 4), 50000)


@pytest.mark.parametrize("extra", [
    "\n[signal2]\nx = 1\n",
    "\n[hpa]\nalpha = 1.0\n",
    "\n[numerics]\nseed = 1\nseeds = [2]\n",
    "\n[numerics]\nseeds = []\n",
    "\n[numerics]\nL = 2.5\n",
    "\n[omux]\npath = \"nowhere.csv\"\n",
])
def test_rejected(extra):
    with pytest.raises(ScenarioError):
        parse_scenario(BASE + extra)


def test_unknown_carrier_key():
    with pytest.raises(ScenarioError, match="roloff"):
        parse_scenario(BASE.replace("rolloff = 0.35", "roloff = 0.35"))


def test_power_fractions_must_sum_to_one():
    with pytest.raises(ScenarioError):
        parse_scenario(BASE.replace("power_fraction = 0.5\n\n", "power_fraction = 0.4\n\n", 1))


def test_bad_toml_and_missing_file(tmp_path):
    with pytest.raises(ScenarioError):
        parse_scenario("[signal\n")
    with pytest.raises(ScenarioError):
        load_scenario(tmp_path / "none.toml")


def test_relative_omux_path(tmp_path):
    (tmp_path / "o.csv").write_text("freq_mhz,gain_db,group_delay_ns\n" +
                                    "".join(f"{f},0,0\n" for f in range(-400, 401, 10)))
    (tmp_path / "s.toml").write_text(BASE + '\n[omux]\npath = "o.csv"\n')
    sc = load_scenario(tmp_path / "s.toml")
    assert sc.omux.support == (-400.0, 400.0)
