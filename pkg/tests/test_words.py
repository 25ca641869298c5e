import io

import pytest

from betadio.words import (
    DigitStream,
    DigitWord,
    PeriodicWord,
    compare_words,
    read_digit_file,
    write_digit_file,
)


def test_digit_word_basics():
    w = DigitWord(3, [1, 0, 2, 2])
    assert len(w) == 4
    assert w[2] == 2
    assert list(w[1:3]) == [0, 2]
    assert w == DigitWord(3, (1, 0, 2, 2))
    with pytest.raises(ValueError):
        DigitWord(3, [3])


def test_digit_word_large_alphabet():
    w = DigitWord(1000, [999, 0, 500])
    assert w[0] == 999 and len(w) == 3


def test_periodic_word_indexing_and_shift():
    w = PeriodicWord((2,), (1, 0))
    assert [w[i] for i in range(6)] == [2, 1, 0, 1, 0, 1]
    assert [w.shift(1)[i] for i in range(4)] == [1, 0, 1, 0]
    assert [w.shift(4)[i] for i in range(3)] == [0, 1, 0]
    finite = PeriodicWord.from_finite([1, 1])
    assert [finite[i] for i in range(4)] == [1, 1, 0, 0]


def test_periodic_word_normalization():
    assert PeriodicWord((), (1, 0, 1, 0)).normalized().per == (1, 0)
    w = PeriodicWord((2, 1), (0, 1)).normalized()
    assert [w[i] for i in range(6)] == [2, 1, 0, 1, 0, 1]
    assert len(w.pre) == 1
    assert PeriodicWord((1, 0, 0), ()).normalized().pre == (1,)
    assert PeriodicWord((1,), (0,)).normalized().per == ()


def test_compare_words():
    a = PeriodicWord((), (1, 0))
    b = PeriodicWord((1, 1), ())
    assert compare_words(a, a) == 0
    assert compare_words(b, a) > 0   # 110^oo beats (10)^oo at index 1
    assert compare_words(a.shift(1), a) < 0
    assert compare_words(PeriodicWord((), (1, 0)), PeriodicWord((1,), (0, 1))) == 0


def test_digit_stream():
    def gen():
        i = 0
        while True:
            yield i % 3
            i += 1

    s = DigitStream(gen(), 3)
    assert s[5] == 2
    assert s.prefix(4).digits() == (0, 1, 2, 0)


def test_digit_file_round_trip():
    buf = io.StringIO()
    write_digit_file(buf, 10, [1, 4, 2, 8, 5, 7], per_line=4)
    text = buf.getvalue()
    assert text.splitlines()[0] == "base=10"
    back = read_digit_file(io.StringIO(text))
    assert back.digits() == (1, 4, 2, 8, 5, 7)
    with pytest.raises(ValueError):
        read_digit_file(io.StringIO("digits 1 2 3"))
