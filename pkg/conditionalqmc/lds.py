# Copyright (c) 2026 The conditionalqmc authors. Licensed under MIT License.

from enum import IntEnum
from functools import lru_cache
from importlib import resources
from typing import List, Optional, Sequence, Tuple, Union
import logging
import pathlib

from attr import define
import attr
import numpy as np

from .models.Sampler import Sampler
from .models.ScrambleSeed import ScrambleSeed

LOGGER = logging.getLogger(__name__)

DEFAULT_BITS = 32
MAX_EXPONENT = 20
DIRECTION_NUMBERS_FILE = "new-joe-kuo-6.64.txt"

class NetStatus(IntEnum):
    DIMENSION_UNSUPPORTED = 1
    """
    The requested dimension exceeds the direction-number table.
    """

    MALFORMED_TABLE = 2
    """
    A direction-number file could not be parsed.
    """


class NetException(Exception):
    def __init__(self, status: NetStatus, message: Optional[str] = None):
        super().__init__("Digital net construction failed with status " + status.name + (": " + message if message else ""))
        self.status = status


@define(frozen=True)
class DirectionRecord:
    """
    One line of a Joe–Kuo direction-number table.
    """

    dimension: int = attr.ib()

    degree: int = attr.ib()
    """
    The degree s of the primitive polynomial.
    """

    coefficients: int = attr.ib()
    """
    The interior polynomial coefficients a, packed as an integer.
    """

    initial: Tuple[int, ...] = attr.ib()
    """
    The initial direction numbers m_1..m_s.
    """


def load_direction_numbers(path: Union[str, pathlib.Path, None] = None) -> List[DirectionRecord]:
    """
    Read a direction-number table in the Joe–Kuo column layout `d s a m_1..m_s`.

    :param path: A table file. Defaults to the bundled table covering dimensions 1 to 64.
    :return: One record per line, for dimensions 2 and up. Dimension 1 has no record.
    :throws NetException: If a line does not follow the layout.
    """
    if path is None:
        text = resources.files("conditionalqmc").joinpath("data").joinpath(DIRECTION_NUMBERS_FILE).read_text(encoding="utf-8")
        source = DIRECTION_NUMBERS_FILE
    else:
        try:
            text = pathlib.Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise NetException(NetStatus.MALFORMED_TABLE, f"cannot read {path}") from e
        source = str(path)
    records = []
    for number, line in enumerate(text.splitlines(), start=1):
        fields = line.split()
        if not fields or fields[0].startswith("#") or fields[0] == "d":
            continue
        try:
            values = [int(field) for field in fields]
        except ValueError as e:
            raise NetException(NetStatus.MALFORMED_TABLE, f"{source}:{number}: non-integer field") from e
        if len(values) < 4 or len(values) != 3 + values[1]:
            raise NetException(NetStatus.MALFORMED_TABLE, f"{source}:{number}: expected d s a followed by s numbers")
        record = DirectionRecord(values[0], values[1], values[2], tuple(values[3:]))
        if any(m % 2 == 0 or m >= 2 ** (k + 1) for k, m in enumerate(record.initial)):
            raise NetException(NetStatus.MALFORMED_TABLE, f"{source}:{number}: m_k must be odd and below 2^k")
        if record.dimension != len(records) + 2:
            raise NetException(NetStatus.MALFORMED_TABLE, f"{source}:{number}: dimensions must start at 2 and be consecutive")
        records.append(record)
    return records


@lru_cache(maxsize=None)
def _bundled_records() -> Tuple[DirectionRecord, ...]:
    return tuple(load_direction_numbers())


def _direction_integers(record: Optional[DirectionRecord], bits: int) -> np.ndarray:
    v = np.zeros(bits, dtype=np.uint64)
    if record is None:
        for k in range(bits):
            v[k] = 1 << (bits - 1 - k)
        return v
    s, a = record.degree, record.coefficients
    for k in range(min(s, bits)):
        v[k] = record.initial[k] << (bits - 1 - k)
    for k in range(s, bits):
        value = int(v[k - s]) ^ (int(v[k - s]) >> s)
        for l in range(1, s):
            if (a >> (s - 1 - l)) & 1:
                value ^= int(v[k - l])
        v[k] = value
    return v


@define(frozen=True)
class DigitalNet:
    """
    The base-2 Sobol' sequence in s dimensions at a fixed bit precision.
    """

    s: int = attr.ib()

    bits: int = attr.ib()

    direction: np.ndarray = attr.ib(eq=False, repr=False)
    """
    Direction integers, shape (s, bits); entry (i, k) is v_k of dimension i+1 scaled by 2^bits.
    """

    @classmethod
    def sobol(cls, s: int, bits: int = DEFAULT_BITS, records: Optional[Sequence[DirectionRecord]] = None) -> 'DigitalNet':
        """
        :param s: The dimension.
        :param bits: The bit precision, at most 52.
        :param records: A direction-number table; defaults to the bundled one.
        :throws NetException: If s exceeds the table.
        """
        if s < 1:
            raise ValueError(f"s must be at least 1, got {s}")
        if not 1 <= bits <= 52:
            raise ValueError(f"bits must be in 1..52, got {bits}")
        records = _bundled_records() if records is None else records
        if s > len(records) + 1:
            raise NetException(NetStatus.DIMENSION_UNSUPPORTED, f"s={s} but the direction-number table covers {len(records) + 1} dimensions")
        direction = np.stack([_direction_integers(None if i == 0 else records[i - 1], bits) for i in range(s)])
        direction.setflags(write=False)
        return cls(s, bits, direction)


@lru_cache(maxsize=128)
def sobol_net(s: int) -> DigitalNet:
    LOGGER.debug("Building Sobol' net with s=%d", s)
    return DigitalNet.sobol(s)


def _check_exponent(m: int) -> None:
    if not 0 <= m <= MAX_EXPONENT:
        raise ValueError(f"m must be in 0..{MAX_EXPONENT}, got {m}")


def _gray_code_integers(direction: np.ndarray, m: int) -> np.ndarray:
    index = np.arange(2 ** m, dtype=np.uint64)
    gray = index ^ (index >> np.uint64(1))
    points = np.zeros((2 ** m, direction.shape[0]), dtype=np.uint64)
    for k in range(m):
        selected = ((gray >> np.uint64(k)) & np.uint64(1)).astype(bool)
        points[selected] ^= direction[:, k]
    return points


def sobol_points(net: DigitalNet, m: int, skip_origin: bool = False) -> np.ndarray:
    """
    The first 2^m points of the unscrambled sequence, in Gray-code order.

    :param net: The net.
    :param m: log2 of the number of points, 0 to 20.
    :param skip_origin: Drop the initial point (0,…,0).
    :return: Points in [0,1)^s, shape (2^m, s), or (2^m − 1, s) when skipping the origin.
    """
    _check_exponent(m)
    points = _gray_code_integers(net.direction, m).astype(float) * 2.0 ** -net.bits
    return points[1:] if skip_origin else points


def _parity(x: np.ndarray) -> np.ndarray:
    x = x.copy()
    for shift in (32, 16, 8, 4, 2, 1):
        x ^= x >> np.uint64(shift)
    return x & np.uint64(1)


@define(frozen=True)
class LinearScramble:
    """
    Per dimension, a lower-triangular bit matrix with unit diagonal and a digital shift.

    Bit 0 is the most significant binary digit of a coordinate.
    """

    matrices: np.ndarray = attr.ib(eq=False, repr=False)
    """
    Shape (s, bits, bits), entries 0 or 1.
    """

    shift: np.ndarray = attr.ib(eq=False)
    """
    Shape (s,), the shift digits packed as bits-wide integers.
    """

    @classmethod
    def draw(cls, net: DigitalNet, generator: np.random.Generator) -> 'LinearScramble':
        lower = np.tril(generator.integers(0, 2, size=(net.s, net.bits, net.bits), dtype=np.uint8), -1)
        matrices = lower | np.eye(net.bits, dtype=np.uint8)
        shift = generator.integers(0, 2 ** net.bits, size=net.s, dtype=np.uint64)
        return cls(matrices, shift)

    @classmethod
    def identity(cls, net: DigitalNet) -> 'LinearScramble':
        matrices = np.broadcast_to(np.eye(net.bits, dtype=np.uint8), (net.s, net.bits, net.bits)).copy()
        return cls(matrices, np.zeros(net.s, dtype=np.uint64))

    def apply(self, direction: np.ndarray) -> np.ndarray:
        """
        Multiply each column of direction integers by its dimension's bit matrix over GF(2).
        """
        bits = self.matrices.shape[1]
        weights = np.uint64(1) << np.arange(bits - 1, -1, -1, dtype=np.uint64)
        rows = np.sum(self.matrices.astype(np.uint64) * weights, axis=2, dtype=np.uint64)
        products = _parity(rows[:, :, None] & direction[:, None, :])
        return np.sum(products * weights[None, :, None], axis=1, dtype=np.uint64)


@define(frozen=True)
class ScrambledNet:
    """
    A Matoušek linear scramble plus digital shift of a DigitalNet.
    """

    net: DigitalNet = attr.ib()

    scramble: LinearScramble = attr.ib(repr=False)

    direction: np.ndarray = attr.ib(eq=False, repr=False)
    """
    The scrambled direction integers L·v_k.
    """

    @classmethod
    def from_scramble(cls, net: DigitalNet, scramble: LinearScramble) -> 'ScrambledNet':
        direction = scramble.apply(net.direction)
        direction.setflags(write=False)
        return cls(net, scramble, direction)

    def points(self, m: int) -> np.ndarray:
        """
        The first 2^m scrambled points, clamped to [2^−bits, 1 − 2^−bits].
        """
        _check_exponent(m)
        integers = _gray_code_integers(self.direction, m) ^ self.scramble.shift[None, :]
        scale = 2.0 ** -self.net.bits
        return np.clip(integers.astype(float) * scale, scale, 1.0 - scale)


def scramble(net: DigitalNet, seed: ScrambleSeed) -> ScrambledNet:
    """
    Randomize a net with a linear scramble drawn from seed.

    :param net: The net to scramble.
    :param seed: Identifies the randomization; equal seeds give identical point streams.
    :return: The scrambled net.
    """
    return ScrambledNet.from_scramble(net, LinearScramble.draw(net, seed.generator()))


def elementary_interval_counts(points: np.ndarray, exponents: Sequence[int]) -> np.ndarray:
    """
    Count the points in each cell of the dyadic grid that splits axis i into 2^exponents[i] cells.

    :param points: Shape (n, s).
    :param exponents: One nonnegative exponent per axis.
    :return: An integer array of shape (2^exponents[0], …, 2^exponents[s−1]).
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    exponents = tuple(int(k) for k in exponents)
    if any(k < 0 for k in exponents):
        raise ValueError(f"exponents must be nonnegative, got {exponents}")
    if points.size and points.shape[1] != len(exponents):
        raise ValueError(f"expected one exponent per axis ({points.shape[1]}), got {len(exponents)}")
    if points.size and 2 ** sum(exponents) > points.shape[0]:
        raise ValueError(f"a grid of 2^{sum(exponents)} cells needs at least as many points, got {points.shape[0]}")
    shape = tuple(2 ** k for k in exponents)
    if not points.size:
        return np.zeros(shape, dtype=np.int64)
    cells = np.stack([np.minimum(np.floor(points[:, i] * shape[i]).astype(np.int64), shape[i] - 1) for i in range(len(shape))])
    flat = np.ravel_multi_index(tuple(cells), shape)
    return np.bincount(flat, minlength=int(np.prod(shape))).reshape(shape)


class SobolSampler:
    """
    Scrambled Sobol' points; each seed gives an independent randomization.
    """
    kind = Sampler.RQMC

    def __init__(self, s: int):
        self.s = s
        self._net = sobol_net(s)

    def uniforms(self, m: int, seed: ScrambleSeed) -> np.ndarray:
        return scramble(self._net, seed).points(m)


class MonteCarloSampler:
    """
    IID uniforms from the same seed derivation as SobolSampler.
    """
    kind = Sampler.MC

    def __init__(self, s: int):
        if s < 1:
            raise ValueError(f"s must be at least 1, got {s}")
        self.s = s

    def uniforms(self, m: int, seed: ScrambleSeed) -> np.ndarray:
        _check_exponent(m)
        scale = 2.0 ** -DEFAULT_BITS
        return np.clip(seed.generator().random((2 ** m, self.s)), scale, 1.0 - scale)


def make_sampler(kind: Sampler, s: int) -> Union[SobolSampler, MonteCarloSampler]:
    if kind == Sampler.RQMC:
        return SobolSampler(s)
    return MonteCarloSampler(s)
