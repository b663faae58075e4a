import json
import os
from fractions import Fraction

import pytest

import lyaptrade

CONFIGS = os.environ.get("LYAPTRADE_CONFIGS", os.path.join(os.path.dirname(__file__), "..", "..", "configs"))


def two_price_market():
    return lyaptrade.Market.from_dict({"stocks": [{"mu_max": 1, "p_max": 2}]})


def test_market_round_trip():
    m = two_price_market()
    assert len(m) == 1
    again = lyaptrade.Market.from_dict(m.to_dict())
    assert again.to_dict() == m.to_dict()


def test_bad_market_raises():
    with pytest.raises(ValueError):
        lyaptrade.Market.from_dict({"stocks": [{"mu_max": 0, "p_max": 2}]})


def test_theta_and_profit():
    m = two_price_market()
    assert [Fraction(t) for t in lyaptrade.compute_theta(m, 50)] == [Fraction(102)]
    assert lyaptrade.compute_theta(m, "1/3") == ["8/3"]
    assert lyaptrade.slot_profit(m, [2.0], [0], [1]) == pytest.approx(2.0)
    assert lyaptrade.slot_profit(m, [1.0], [1], [0]) == pytest.approx(-1.0)


def test_trader_step_buys_low_sells_high():
    m = two_price_market()
    low = lyaptrade.trader_step({"V": 50}, m, [1], [1.0])
    assert low["buys"] == [1] and low["sells"] == [0] and low["queue"] == [2]
    high = lyaptrade.trader_step({"V": 50}, m, [5], [2.0])
    assert high["sells"] == [1] and high["queue"] == [4]


def test_backtest_is_deterministic_and_banded():
    m = two_price_market()
    a = lyaptrade.backtest({"V": 50}, m, [[1.0], [2.0]], [0.5, 0.5], 500, 3)
    b = lyaptrade.backtest({"V": 50}, m, [[1.0], [2.0]], [0.5, 0.5], 500, 3)
    assert a == b
    assert a["queue_band"]
    assert len(a["queues"]) == 501
    assert sum(a["profits"]) == pytest.approx(a["cumulative_profit"])


def test_phi_opt_and_lookahead():
    m = two_price_market()
    r = lyaptrade.phi_opt(m, [[1.0], [2.0]], [0.7, 0.3])
    assert Fraction(r["exact"]) == Fraction(3, 10)
    assert r["rebalanced_drifts"][0] == pytest.approx(0.0, abs=1e-12)
    la = lyaptrade.lookahead_psi(m, [[1.0], [2.0], [2.0], [1.0]])
    # Sell at both $2 slots, buy back at both $1 slots.
    assert la["psi"] == pytest.approx(2.0)
    assert len(la["decisions"]) == 4


def test_constants():
    c = lyaptrade.compute_constants(two_price_market(), 2)
    assert c["D"] == pytest.approx(2.125)
    assert c["C1"] == pytest.approx(c["D"])


def test_run_config_file():
    with open(os.path.join(CONFIGS, "two_price.json")) as f:
        cfg = json.load(f)
    cfg["horizon"] = 300
    summary = lyaptrade.run(cfg, jobs=2)
    assert summary["exit_code"] == 0
    assert len(summary["replications"]) == 30
    cfg.pop("seed")
    with pytest.raises(ValueError):
        lyaptrade.run(cfg)
