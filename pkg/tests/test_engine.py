from dataclasses import replace
from fractions import Fraction

import pytest

from vmqkd import channel as ch
from vmqkd.engine import Engine, ProtocolConfig, efficiency, run_chain
from vmqkd.errors import AuthReject, DecryptMismatch, HopFailed, IncompleteRun, MaxRoundsExceeded
from vmqkd.rng import make_rng
from vmqkd.transcript import Transcript

EVE = ch.ChannelConfig(adversary=ch.InterceptResend(1.0))


def engine(seed=0, **kw):
    return Engine(ProtocolConfig(**kw), make_rng(seed)).setup()


def test_setup_reconstructs_secret():
    eng = engine(t=3)
    assert all(h.secret == eng.dealer.secret for h in eng.holders)
    assert len(eng.dealer.K) == 33


def test_config_validation():
    for bad in (dict(p=12), dict(t=4, n=3), dict(m=0), dict(eps1=1.5), dict(max_rounds=0), dict(p=5, t=4)):
        with pytest.raises(ValueError):
            ProtocolConfig(**bad)


def test_identification_honest():
    eng = engine()
    a, b = eng.dealer, eng.holders[0]
    eng.identify(a, b, 12345)
    assert b.expected_t0 == 12345


@pytest.mark.parametrize("which", ["k_ij", "k_ji"])
def test_identification_rejects_every_single_key_perturbation(which):
    eng = engine()
    a, b = eng.dealer, eng.holders[0]
    true = a.keys_with(b.identity)
    for delta in range(1, 11):
        a.session_keys[b.identity] = replace(true, **{which: getattr(true, which) + delta})
        with pytest.raises(AuthReject):
            eng.identify(a, b, 5)


def test_identification_rejects_wrong_identity():
    eng = engine()
    a, b = eng.dealer, eng.holders[0]
    impostor = replace(a, identity=eng.holders[2].identity, session_keys=dict(a.session_keys))
    impostor.session_keys[b.identity] = a.keys_with(b.identity)
    with pytest.raises(AuthReject):
        eng.identify(impostor, b, 5)


def test_stale_t0_aborts_round_on_timing():
    eng = engine(channel=ch.ChannelConfig(delay=3))
    out = eng.distribution_round(eng.dealer, eng.holders[0], range(1, 34))
    assert not out.kept and out.reason == "timing"


def test_timing_window_tolerates_delay():
    eng = engine(channel=ch.ChannelConfig(delay=3), window=2)
    assert eng.distribution_round(eng.dealer, eng.holders[0], range(1, 34)).kept


def test_basis_broadcast_round_trip_and_mismatch():
    eng = engine()
    a, b = eng.dealer, eng.holders[0]
    assert eng.broadcast_r_sequence(a, b, 11, (1, 3, 6, 10, 2, 1, 3, 9, 6, 4, 7)) == [1, 3, 6, 10, 2, 1, 3, 9, 6, 4, 7]
    true = a.keys_with(b.identity)
    a.session_keys[b.identity] = replace(true, k_ij=true.k_ij + 1)
    with pytest.raises(DecryptMismatch):
        eng.broadcast_r_sequence(a, b, 11)


def test_r_vectors_fresh_each_round():
    eng = engine()
    vecs = [eng.broadcast_r_sequence(eng.dealer, eng.holders[0], 11) for _ in range(100)]
    assert all(u != v for u, v in zip(vecs, vecs[1:]))


def test_noiseless_round_harvests_everything():
    eng = engine()
    out = eng.distribution_round(eng.dealer, eng.holders[0], range(1, 34))
    assert out.kept and out.counts == (0, 0, 33) and out.residual == []
    assert eng.holders[0].key_sequence() == eng.dealer.K


def test_noiseless_chain_one_round_per_hop():
    eng = run_chain(ProtocolConfig(t=3), make_rng(1))
    for h in eng.holders:
        assert h.key_sequence() == eng.dealer.K
    assert [e["payload"]["rounds"] for e in eng.transcript.of_type("hop_complete")] == [1, 1, 1]


def test_noisy_hop_converges():
    ok = 0
    for seed in range(100):
        eng = engine(seed, t=1, channel=ch.ChannelConfig(noise=0.05), max_rounds=10)
        try:
            eng.chain()
        except HopFailed:
            continue
        assert eng.holders[0].key_sequence() == eng.dealer.K
        ok += 1
    assert ok >= 95


def test_full_eve_never_converges():
    eng = engine(t=1, channel=EVE, max_rounds=5)
    with pytest.raises(MaxRoundsExceeded):
        eng.full_distribution(eng.dealer, eng.holders[0])
    assert eng.holders[0].key_map == {}
    with pytest.raises(HopFailed) as err:
        engine(t=1, channel=EVE, max_rounds=5).chain()
    assert err.value.hop == 1
    assert isinstance(err.value.cause, MaxRoundsExceeded)


def test_eve_on_second_hop_only():
    eng = engine(t=3, hop_channels={2: EVE}, max_rounds=4)
    with pytest.raises(HopFailed) as err:
        eng.chain()
    assert err.value.hop == 2
    assert eng.holders[0].key_sequence() == eng.dealer.K
    assert all(h.key_map == {} for h in eng.holders[1:])


def test_single_holder_chain():
    eng = run_chain(ProtocolConfig(t=1), make_rng(2))
    assert eng.holders[0].key_sequence() == eng.dealer.K


@pytest.mark.parametrize("t", [1, 2, 3])
def test_efficiency_noiseless(t):
    eng = run_chain(ProtocolConfig(t=t), make_rng(t))
    assert efficiency(eng.transcript) == Fraction(1, 3 * t)


def test_efficiency_drops_with_retries():
    found = 0
    for seed in range(30):
        eng = engine(seed, t=2, channel=ch.ChannelConfig(noise=0.08), max_rounds=16)
        eng.chain()
        rounds = sum(e["payload"]["rounds"] for e in eng.transcript.of_type("hop_complete"))
        if rounds > 2:
            assert efficiency(eng.transcript) < Fraction(1, 6)
            found += 1
    assert found


def test_efficiency_needs_complete_chain():
    with pytest.raises(IncompleteRun):
        efficiency(engine().transcript)


def test_transcripts_deterministic(tmp_path):
    a = run_chain(ProtocolConfig(t=2, channel=ch.ChannelConfig(noise=0.05)), make_rng(4)).transcript
    b = run_chain(ProtocolConfig(t=2, channel=ch.ChannelConfig(noise=0.05)), make_rng(4)).transcript
    assert a.dumps() == b.dumps()
    path = tmp_path / "t.jsonl"
    a.write(path)
    back = Transcript.load(path)
    assert back.dumps() == a.dumps()
    assert efficiency(back) == efficiency(a)


def test_transcript_field_order():
    eng = run_chain(ProtocolConfig(t=1), make_rng(0))
    first = next(eng.transcript.lines())
    assert first.startswith('{"seq_no":0,"tick":0,"event_type":"setup"')
    assert list(eng.transcript.events[0]) == ["seq_no", "tick", "event_type", "actor", "peer", "payload", "counters"]
