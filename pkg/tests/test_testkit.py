import math

import mpmath
import numpy as np
import pytest
from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import erfc

from helpers import random_bits
from ipirand.bitstream import BitStream
from ipirand.errors import PreconditionError
from ipirand.testkit import (
    block_frequency_test,
    cusum_test,
    export_raw,
    import_raw,
    judge,
    monobit_test,
    proportion_interval,
    run_battery,
    runs_test,
    scatter_points,
    serial_test,
)


def pi_bits(count):
    with mpmath.workdps(count):
        v = int(mpmath.floor(mpmath.pi * mpmath.mpf(2) ** (count - 2)))
    return format(v, "b")


def aes_ctr_bits(nbits, key=bytes(16)):
    enc = Cipher(algorithms.AES(key), modes.CTR(bytes(16))).encryptor()
    raw = enc.update(bytes(nbits // 8)) + enc.finalize()
    return BitStream(np.unpackbits(np.frombuffer(raw, dtype=np.uint8)))


PI100 = pi_bits(100)


class TestReferenceVectors:
    def test_pi_prefix(self):
        assert PI100.startswith("1100100100001111110110101010001000100001011010001100001000110100")
        assert len(PI100) == 100

    def test_monobit(self):
        assert monobit_test(BitStream(PI100)) == pytest.approx(0.109599, abs=1e-6)

    def test_block_frequency(self):
        assert block_frequency_test(BitStream(PI100), 10) == pytest.approx(0.706438, abs=1e-6)

    def test_runs(self):
        assert runs_test(BitStream(PI100)) == pytest.approx(0.500798, abs=1e-6)

    def test_cusum(self):
        assert cusum_test(BitStream(PI100), "forward") == pytest.approx(0.219194, abs=1e-6)
        assert cusum_test(BitStream(PI100), "reverse") == pytest.approx(0.114866, abs=1e-6)

    def test_cusum_short(self):
        assert cusum_test(BitStream("1011010111"), "forward", min_bits=0) == pytest.approx(0.4116588, abs=1e-6)

    def test_serial_short(self):
        p1, p2 = serial_test(BitStream("0011011101"), 3, min_bits=0)
        assert p1 == pytest.approx(0.808792, abs=1e-6)
        assert p2 == pytest.approx(0.670320, abs=1e-6)


class TestDegenerate:
    def test_monobit_all_ones(self):
        assert monobit_test(BitStream("1" * 10), min_bits=10) == pytest.approx(erfc(math.sqrt(5)), rel=1e-12)
        assert monobit_test(BitStream("1" * 10), min_bits=10) == pytest.approx(0.001565, abs=1e-6)

    def test_alternating_runs(self):
        assert runs_test(BitStream("01" * 5000)) < 1e-6

    def test_constant_block_frequency(self):
        assert block_frequency_test(BitStream("1" * 10000)) < 1e-6

    def test_constant_serial(self):
        assert serial_test(BitStream("0" * 10000))[0] < 1e-6

    def test_too_short(self):
        with pytest.raises(PreconditionError, match="insufficient"):
            monobit_test(BitStream("01" * 10))

    def test_bad_direction(self):
        with pytest.raises(PreconditionError):
            cusum_test(BitStream("01" * 100), "sideways")

    @settings(max_examples=50, deadline=None)
    @given(st.text(alphabet="01", min_size=100, max_size=400))
    def test_p_values_in_range(self, z):
        b = BitStream(z)
        for p in (monobit_test(b), block_frequency_test(b, 10), runs_test(b), cusum_test(b), *serial_test(b, 2)):
            assert 0.0 <= p <= 1.0


class TestProportion:
    def test_interval(self):
        lo, hi = proportion_interval(0.01, 100)
        assert lo == pytest.approx(0.99 - 3 * math.sqrt(0.99 * 0.01 / 100), abs=1e-15)
        assert lo == pytest.approx(0.9602, abs=1e-4)
        assert hi == pytest.approx(1.0199, abs=1e-4)

    def test_judge_96_of_100(self):
        out = judge("x", [0.5] * 96 + [0.001] * 4, 0.01)
        assert out.pass_count == 96 and not out.proportion_pass

    def test_judge_97_of_100(self):
        assert judge("x", [0.5] * 97 + [0.001] * 3, 0.01).proportion_pass

    def test_all_pass_never_fails(self):
        assert judge("x", [0.5] * 100, 0.01).proportion_pass

    def test_bad_inputs(self):
        with pytest.raises(PreconditionError, match="insufficient"):
            proportion_interval(0.01, 0)
        with pytest.raises(PreconditionError, match="config"):
            proportion_interval(1.5, 10)
        with pytest.raises(PreconditionError, match="invalid p-value"):
            judge("x", [1.5], 0.01)


class TestBattery:
    def test_aes_reference_passes(self):
        rep = run_battery(aes_ctr_bits(10**6), 10_000, 0.01)
        assert rep.m == 100
        assert rep.all_pass
        assert set(rep.family_pass()) == {"monobit", "block_frequency", "runs", "cusum", "serial"}
        assert all(t.uniformity_p > 1e-4 for t in rep.tests)

    def test_biased_source_fails(self, rng):
        bits = BitStream((rng.random(10**5) < 0.52).astype(np.uint8))
        rep = run_battery(bits, 10_000, 0.01)
        assert not rep.family_pass()["monobit"]

    def test_insufficient(self):
        with pytest.raises(PreconditionError, match="insufficient data"):
            run_battery(BitStream("01" * 100), 10_000)

    def test_to_dict(self, rng):
        d = run_battery(random_bits(rng, 20_000), 10_000).to_dict()
        assert d["m"] == 2 and len(d["tests"]) == 7
        assert len(d["tests"][0]["p_values"]) == 2

    def test_custom_tests(self, rng):
        rep = run_battery(random_bits(rng, 3000), 1000, tests={"monobit": monobit_test})
        assert [t.name for t in rep.tests] == ["monobit"]
        assert rep.family_pass() == {"monobit": rep.tests[0].proportion_pass}


class TestScatter:
    def test_two_words(self):
        s = scatter_points(BitStream("10000000" + "01000000"))
        assert s.points.tolist() == [[0.5, 0.25]]

    def test_stride_one(self):
        s = scatter_points(BitStream("00000000" + "11111111" + "10000000"))
        assert s.points.tolist() == [[0.0, 255 / 256], [255 / 256, 0.5]]

    def test_constant_input_single_point(self):
        s = scatter_points(BitStream("0" * 800))
        assert len(s) == 99
        assert np.unique(s.points, axis=0).tolist() == [[0.0, 0.0]]
        assert s.uniformity_chi2() < 1e-6

    def test_random_fills_square(self, rng):
        assert scatter_points(random_bits(rng, 8 * 50000)).uniformity_chi2() > 1e-4

    def test_outputs(self):
        s = scatter_points(BitStream("10000000" + "01000000"), 8)
        assert s.to_csv() == "u,v\n0.5,0.25\n"
        assert s.to_svg().count("<circle") == 1

    def test_word_size(self):
        with pytest.raises(PreconditionError, match="config"):
            scatter_points(BitStream("0" * 100), 4)
        with pytest.raises(PreconditionError, match="too short"):
            scatter_points(BitStream("0" * 20), 16)


class TestExport:
    @settings(max_examples=200)
    @given(st.text(alphabet="01", max_size=300))
    def test_round_trip(self, z):
        b = BitStream(z)
        assert import_raw(export_raw(b, "packed"), "packed", b.length) == b
        assert import_raw(export_raw(b, "ascii"), "ascii") == b

    def test_packed_layout(self):
        assert export_raw(BitStream("1000000011")) == bytes([0x80, 0xC0])

    def test_ascii_layout(self):
        assert export_raw(BitStream("0110"), "ascii") == b"0110"

    def test_length_mismatch(self):
        with pytest.raises(PreconditionError, match="range"):
            import_raw(bytes([0xFF]), "packed", 9)
        with pytest.raises(PreconditionError, match="range"):
            import_raw(b"0101", "ascii", 5)

    def test_unknown_format(self):
        with pytest.raises(PreconditionError, match="config"):
            export_raw(BitStream("0"), "hex")
