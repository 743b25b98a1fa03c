"""Finitely generated group models with exact canonical forms.

Each model fixes a finite symmetric generating set (closed under
inverses, identity excluded) and provides exact element arithmetic:
right multiplication by a generator, a canonical string key that is
equal for two words iff they represent the same group element, and the
inverse parse.  Everything downstream (ball enumeration, word norms,
covers) is built on these three operations, so canonical forms must be
exact, not heuristic.

Built-in models:

* ``Lattice(d)``      free abelian group of rank d, standard basis.
* ``Heisenberg()``    upper unitriangular 3x3 integer matrices.
* ``FreeGroup(k)``    reduced words over k letters.
* ``Lamplighter()``   wreath product of Z/2 by Z, generators t and the
   lamp toggle a (an involution).
* ``InfiniteDihedral()``  two involutions r, s acting on Z as x -> -x
   and x -> -x + 1.
"""

from __future__ import annotations


class GroupModel:
    """Base class; subclasses implement the element arithmetic.

    Elements are opaque hashable values.  ``generators`` lists the full
    symmetric set; generator i and generator ``inverse_of[i]`` form an
    unordered pair (a single index when the generator is an involution).
    """

    name: str = "?"

    def __init__(self):
        self.generators: list[str] = []
        self.inverse_of: list[int] = []

    # -- element arithmetic ------------------------------------------------

    @property
    def identity(self):
        raise NotImplementedError

    def apply(self, element, gen_index: int):
        """Right-multiply ``element`` by generator ``gen_index``."""
        raise NotImplementedError

    def key(self, element) -> str:
        """Canonical key; equal keys iff equal group elements."""
        raise NotImplementedError

    def parse(self, key: str):
        """Inverse of :meth:`key`."""
        raise NotImplementedError

    def coordinates(self, element) -> tuple:
        """Numeric coordinates used for test functions and diagnostics."""
        raise NotImplementedError

    def harmonic_coordinates(self, element) -> tuple:
        """Coordinates whose generator-neighbor increments sum to zero.

        These are exactly harmonic vertex functions on the Cayley graph
        and seed the coordinate harmonic families.
        """
        raise NotImplementedError

    # -- derived -----------------------------------------------------------

    @property
    def generator_count(self) -> int:
        return len(self.generators)

    @property
    def descriptor(self) -> str:
        return self.name

    def pair_representatives(self) -> list[int]:
        """One generator index per unordered pair {s, s^-1}."""
        return [i for i, j in enumerate(self.inverse_of) if i <= j]

    def canonicalize(self, word) -> str:
        """Canonical key of a word given as a sequence of generator indices."""
        e = self.identity
        for g in word:
            e = self.apply(e, g)
        return self.key(e)

    # products of distinct harmonic coordinates (and differences of their
    # squares) stay harmonic on these models; see harmonic.py
    supports_quadratic_family = False

    def __repr__(self):
        return f"<GroupModel {self.descriptor}>"


class Lattice(GroupModel):
    """Free abelian group of rank d with generating set {+-e_i}."""

    supports_quadratic_family = True

    def __init__(self, d: int):
        super().__init__()
        if d < 1:
            raise ValueError("lattice rank must be >= 1")
        self.d = d
        self.name = f"Z{d}" if d > 1 else "Z"
        for i in range(d):
            self.generators += [f"e{i + 1}", f"e{i + 1}^-1"]
            self.inverse_of += [2 * i + 1, 2 * i]

    @property
    def identity(self):
        return (0,) * self.d

    def apply(self, element, gen_index):
        axis, sign = divmod(gen_index, 2)
        step = 1 if sign == 0 else -1
        e = list(element)
        e[axis] += step
        return tuple(e)

    def key(self, element):
        return ",".join(str(c) for c in element)

    def parse(self, key):
        return tuple(int(c) for c in key.split(","))

    def coordinates(self, element):
        return tuple(float(c) for c in element)

    harmonic_coordinates = coordinates


class Heisenberg(GroupModel):
    """Discrete Heisenberg group H3(Z).

    Elements are the integer triples (a, b, c) of the unitriangular
    matrix [[1,a,c],[0,1,b],[0,0,1]]; generators are x (a += 1) and
    y (b += 1, c += a) with their inverses.
    """

    supports_quadratic_family = True

    name = "H3"

    def __init__(self):
        super().__init__()
        self.generators = ["x", "x^-1", "y", "y^-1"]
        self.inverse_of = [1, 0, 3, 2]

    @property
    def identity(self):
        return (0, 0, 0)

    def apply(self, element, gen_index):
        a, b, c = element
        if gen_index == 0:
            return (a + 1, b, c)
        if gen_index == 1:
            return (a - 1, b, c)
        if gen_index == 2:
            return (a, b + 1, c + a)
        return (a, b - 1, c - a)

    def key(self, element):
        return ",".join(str(c) for c in element)

    def parse(self, key):
        return tuple(int(c) for c in key.split(","))

    def coordinates(self, element):
        return tuple(float(c) for c in element)

    def harmonic_coordinates(self, element):
        # a and b are harmonic; so is c, but the quadratic family is
        # built from the abelianization pair only
        return (float(element[0]), float(element[1]))


class FreeGroup(GroupModel):
    """Free group on k letters, elements stored as reduced words."""

    supports_quadratic_family = True

    LETTERS = "abcd"

    def __init__(self, k: int):
        super().__init__()
        if not 1 <= k <= 4:
            raise ValueError("free rank must be in 1..4")
        self.k = k
        self.name = f"F{k}"
        for i in range(k):
            low = self.LETTERS[i]
            self.generators += [low, low.upper()]
            self.inverse_of += [2 * i + 1, 2 * i]

    @property
    def identity(self):
        return ""

    def apply(self, element, gen_index):
        i, sign = divmod(gen_index, 2)
        letter = self.LETTERS[i] if sign == 0 else self.LETTERS[i].upper()
        if element and element[-1] == letter.swapcase():
            return element[:-1]
        return element + letter

    def key(self, element):
        return element if element else "e"

    def parse(self, key):
        return "" if key == "e" else key

    def coordinates(self, element):
        return tuple(
            float(element.count(self.LETTERS[i]) - element.count(self.LETTERS[i].upper()))
            for i in range(self.k)
        )

    harmonic_coordinates = coordinates


class Lamplighter(GroupModel):
    """Wreath product of Z/2 by Z.

    Elements are (cursor, lit) with ``lit`` a frozen set of lamp
    positions.  Generators: cursor moves t, t^-1 and the involution a
    toggling the lamp under the cursor.
    """

    name = "lamplighter"

    def __init__(self):
        super().__init__()
        self.generators = ["t", "t^-1", "a"]
        self.inverse_of = [1, 0, 2]

    @property
    def identity(self):
        return (0, frozenset())

    def apply(self, element, gen_index):
        m, lit = element
        if gen_index == 0:
            return (m + 1, lit)
        if gen_index == 1:
            return (m - 1, lit)
        return (m, lit.symmetric_difference((m,)))

    def key(self, element):
        m, lit = element
        return f"{m}|" + ",".join(str(p) for p in sorted(lit))

    def parse(self, key):
        cursor, _, lamps = key.partition("|")
        lit = frozenset(int(p) for p in lamps.split(",")) if lamps else frozenset()
        return (int(cursor), lit)

    def coordinates(self, element):
        m, lit = element
        return (float(m), float(len(lit)))

    def harmonic_coordinates(self, element):
        return (float(element[0]),)


class InfiniteDihedral(GroupModel):
    """Infinite dihedral group generated by two involutions r, s.

    Realized as affine maps of Z: an element (eps, n) sends x to
    eps*x + n, with r = (-1, 0) and s = (-1, 1).  The Cayley graph is a
    line; the signed line position is the harmonic coordinate.
    """

    name = "dihedral"

    def __init__(self):
        super().__init__()
        self.generators = ["r", "s"]
        self.inverse_of = [0, 1]

    @property
    def identity(self):
        return (1, 0)

    def apply(self, element, gen_index):
        eps, n = element
        if gen_index == 0:
            return (-eps, n)
        return (-eps, n + eps)

    def key(self, element):
        return f"{element[0]},{element[1]}"

    def parse(self, key):
        eps, n = key.split(",")
        return (int(eps), int(n))

    def coordinates(self, element):
        eps, n = element
        return (float(n), float(eps))

    def harmonic_coordinates(self, element):
        eps, n = element
        return (2.0 * n - (1 - eps) / 2.0,)


MODEL_FACTORIES = {
    "Z": lambda: Lattice(1),
    "Z2": lambda: Lattice(2),
    "Z3": lambda: Lattice(3),
    "H3": Heisenberg,
    "F2": lambda: FreeGroup(2),
    "F3": lambda: FreeGroup(3),
    "lamplighter": Lamplighter,
    "dihedral": InfiniteDihedral,
}


def supported_models() -> list[str]:
    return sorted(MODEL_FACTORIES)


def get_model(name: str) -> GroupModel:
    try:
        factory = MODEL_FACTORIES[name]
    except KeyError:
        raise ValueError(
            f"unknown group {name!r}; supported models: {', '.join(supported_models())}"
        ) from None
    return factory()
