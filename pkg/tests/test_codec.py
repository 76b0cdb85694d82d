import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lzkit import Alphabet, BitStream, KeyStream, Sequence, lz_complexity
from lzkit.codec import (
    code_length,
    lz78_decode,
    lz78_encode,
    otp_apply,
    otp_decrypt,
)
from lzkit.errors import (
    AlphabetMismatchError,
    DecodeError,
    KeyExhaustedError,
    PhraseIdError,
    TrailingDataError,
    TruncatedPayloadError,
)

from conftest import seq
from oracles import token_bits

REPEAT = "repeatandrepeatandrepeatandrepeatandrepeat"


def bitstring(b: BitStream) -> str:
    return "".join(format(v, "08b") for v in b.payload)[: b.nbits]


def header(n: int, asize: int) -> bytes:
    return b"LZ78" + bytes([1]) + n.to_bytes(4, "big") + asize.to_bytes(2, "big")


def test_hand_traced_tokens():
    b = lz78_encode(seq("0000"))
    assert bitstring(b) == "01001"
    assert b.payload == bytes([0b01001000])
    assert code_length(seq("0000")) == 5


def test_decode_hand_traced_payload():
    b = BitStream.from_bytes(header(4, 2) + bytes([0b01001000]))
    assert lz78_decode(b, Alphabet.binary()) == seq("0000")


def test_empty_sequence():
    b = lz78_encode(Sequence(Alphabet.binary(), ()))
    assert (b.n, b.nbits, b.payload) == (0, 0, b"")
    assert b.to_bytes() == header(0, 2)
    assert len(lz78_decode(BitStream.from_bytes(b.to_bytes()), Alphabet.binary())) == 0


def test_header_layout():
    x = Sequence.from_text(REPEAT, "abcdefghijklmnopqrstuvwxyz")
    raw = lz78_encode(x).to_bytes()
    assert raw[:11] == b"LZ78\x01" + (42).to_bytes(4, "big") + (26).to_bytes(2, "big")


def test_repeat_string_length_matches_emitted_bits():
    x = Sequence.from_text(REPEAT, "abcdefghijklmnopqrstuvwxyz")
    b = lz78_encode(x)
    assert b.nbits == code_length(x) == token_bits(x.symbols, 26)
    assert lz78_decode(BitStream.from_bytes(b.to_bytes()), x.alphabet) == x


def test_unary_alphabet_needs_no_symbol_bits():
    x = Sequence(Alphabet(1), (0,) * 10)  # phrases of length 1..4
    assert code_length(x) == token_bits(x.symbols, 1) == 0 + 1 + 2 + 2
    assert lz78_decode(lz78_encode(x), Alphabet(1)) == x


def _roundtrip(x: Sequence) -> None:
    b = lz78_encode(x)
    assert b.nbits == code_length(x)
    assert len(b.payload) == (b.nbits + 7) // 8
    back = lz78_decode(BitStream.from_bytes(b.to_bytes()), x.alphabet)
    assert back == x


@settings(max_examples=400, deadline=None)
@given(st.integers(1, 300).flatmap(
    lambda a: st.tuples(st.just(a), st.lists(st.integers(0, a - 1), max_size=300))))
def test_roundtrip_and_length_oracle(case):
    a, xs = case
    x = Sequence(Alphabet(a), tuple(xs))
    _roundtrip(x)
    assert code_length(x) == token_bits(xs, a)


@pytest.mark.parametrize(
    "symbols, asize",
    [
        ((0,) * 5000, 2),
        ((0, 1) * 2500, 2),
        (tuple(range(256)) * 4, 256),
        # de Bruijn B(2, 10) prefix
        (tuple(int(c) for c in "0000000000" + "1" * 10 + "0101010101" * 20), 2),
        (tuple(range(60000)), 60000),
    ],
    ids=["constant", "alternating", "all-distinct-bytes", "mixed", "huge-alphabet"],
)
def test_adversarial_roundtrips(symbols, asize):
    _roundtrip(Sequence(Alphabet(asize), symbols))


def test_large_random_bytes_roundtrip():
    rng = np.random.default_rng(11)
    data = rng.integers(0, 256, 10**5).astype(np.uint8).tobytes()
    _roundtrip(Sequence.from_bytes(data, Alphabet.raw_bytes()))


def test_repetition_compresses_better_with_more_copies():
    w = (0, 1, 1, 0, 1, 0, 0, 0, 1, 1, 1)

    def rate(k):
        x = Sequence(Alphabet.binary(), w * k)
        return code_length(x) / len(x)

    assert rate(64) < rate(8)


def test_fair_coin_is_incompressible():
    rng = np.random.default_rng(5)
    x = Sequence(Alphabet.binary(), tuple(rng.integers(0, 2, 2**16).tolist()))
    assert 0.9 <= code_length(x) / len(x) <= 1.3


# ---------------------------------------------------------------- malformed input


def test_bad_phrase_id():
    # tokens "0" (t=1), "1"+"0" (t=2), then t=3 with index bits "11": id 3 >= 3
    raw = header(10, 2) + bytes([0b01011000])
    with pytest.raises(PhraseIdError):
        lz78_decode(BitStream.from_bytes(raw), Alphabet.binary())


def test_truncated_payload():
    raw = lz78_encode(seq("0110100110010110" * 8)).to_bytes()
    with pytest.raises(TruncatedPayloadError):
        lz78_decode(BitStream.from_bytes(raw[:-3]), Alphabet.binary())
    with pytest.raises(TruncatedPayloadError):
        BitStream.from_bytes(raw[:5])


def test_trailing_garbage():
    raw = lz78_encode(seq("0000")).to_bytes()
    with pytest.raises(TrailingDataError):
        lz78_decode(BitStream.from_bytes(raw + b"\x00"), Alphabet.binary())
    with pytest.raises(TrailingDataError):
        lz78_decode(BitStream.from_bytes(raw[:-1] + bytes([raw[-1] | 1])), Alphabet.binary())


def test_bad_magic_and_version():
    raw = lz78_encode(seq("01")).to_bytes()
    with pytest.raises(DecodeError):
        BitStream.from_bytes(b"LZ77" + raw[4:])
    with pytest.raises(DecodeError):
        BitStream.from_bytes(raw[:4] + b"\x02" + raw[5:])


def test_alphabet_mismatch_on_decode():
    b = lz78_encode(seq("0101"))
    with pytest.raises(AlphabetMismatchError):
        lz78_decode(b, Alphabet(3))


# ---------------------------------------------------------------- one-time pad


def test_zero_key_is_identity():
    b = lz78_encode(seq("0110101110001"))
    assert otp_apply(b, KeyStream.zeros(b.nbits)).payload == b.payload


def test_otp_is_an_involution_and_counts_bits():
    x = Sequence.from_text(REPEAT, "abcdefghijklmnopqrstuvwxyz")
    b = lz78_encode(x)
    k1, k2 = KeyStream.from_seed(99), KeyStream.from_seed(99)
    c = otp_apply(b, k1)
    assert c.payload != b.payload
    assert k1.consumed == b.nbits
    assert otp_apply(c, k2).payload == b.payload
    assert (c.n, c.alphabet_size) == (b.n, b.alphabet_size)


def test_decrypt_ciphertext_read_from_bytes():
    rng = np.random.default_rng(8)
    x = Sequence.from_bytes(rng.integers(0, 256, 3000).astype(np.uint8).tobytes(),
                            Alphabet.raw_bytes())
    cipher = otp_apply(lz78_encode(x), KeyStream.from_seed(1234))
    key = KeyStream.from_seed(1234)
    plain = otp_decrypt(BitStream.from_bytes(cipher.to_bytes()), key)
    assert key.consumed == cipher.nbits
    assert lz78_decode(plain, Alphabet.raw_bytes()) == x


def test_finite_key_exhausted():
    b = lz78_encode(seq("0110101110001" * 10))
    with pytest.raises(KeyExhaustedError):
        otp_apply(b, KeyStream(bytes(2)))
    key = KeyStream(bytes(1))
    with pytest.raises(KeyExhaustedError):
        key.take(9)
    assert key.consumed == 0


def test_key_consumption_tracks_complexity():
    rng = np.random.default_rng(21)
    x = Sequence(Alphabet.binary(), tuple(rng.integers(0, 2, 2**16).tolist()))
    key = KeyStream.from_seed(3)
    otp_apply(lz78_encode(x), key)
    assert abs(key.consumed / len(x) - lz_complexity(x)) <= 0.25


def test_ciphertext_bits_are_unbiased():
    rng = np.random.default_rng(4)
    x = Sequence(Alphabet.binary(), tuple((rng.random(2**16) < 0.1).astype(int).tolist()))
    cipher = otp_apply(lz78_encode(x), KeyStream.from_seed(77))
    bits = np.unpackbits(np.frombuffer(cipher.payload, np.uint8))[: cipher.nbits]
    assert abs(bits.mean() - 0.5) <= 0.02
