"""The worked example in X_3: a projective 5-simplex glued by a, b, c.

The literal below is the canonical JSON form of the data (sorted keys, no
whitespace). Vertices are the printed vectors v with alpha = v v^T; slots
name the element filling each pairing slot.
"""
import hashlib
import json
import logging
from typing import Any, Dict, List, Tuple

import numpy as np
from pydantic import BaseModel

from dsdomain.core.matcore import (
    FROZEN,
    Isometry,
    IsometryWord,
    SpacePoint,
    SymMatrix,
    as_matrix,
    as_vector,
    identity,
)
from dsdomain.errors import GeneratorSetError
from dsdomain.poincare.domain import GeneratorSet

logger = logging.getLogger(__name__)

PINNED_CORPUS_JSON = (
    '{"generators":{"a":[["1/2","1/2","0"],["1/2","-1/2","1"],["1/2","-1/2","-1"]],'
    '"b":[["-1/2","1","1/2"],["-1/2","-1","1/2"],["1/2","0","1/2"]],'
    '"c":[["-1","1/2","-1/2"],["0","1/2","1/2"],["1","1/2","-1/2"]]},'
    '"parabolic":{"u":[["1","1","-1"],["0","0","1"],["0","-1","2"]],'
    '"v":[["0","0","-1"],["-1","1","-1"],["1","0","2"]],'
    '"w":[["0","0","-1"],["1","1","1"],["1","0","2"]]},'
    '"relators":{"parabolic":[["u","v","u^-1","v^-1","w^-1","w^-1"],["u","w","u^-1","w^-1"],["v","w","v^-1","w^-1"]],'
    '"presentation":[["a","b","a^-1","b^-1","a","b","a^-1","b^-1"],["a","b","a","b","a","a","b","a","b","a"],'
    '["a","a","b^-1","a","a","b^-1"],["a","b","b","b","a","b","b","b"]]},'
    '"slots":["a","a^-1","b","b^-1","c","c^-1"],'
    '"vertices":[["1","1","0"],["1","-1","0"],["1","0","1"],["1","0","-1"],["0","1","1"],["0","1","-1"]]}'
)

PINNED_DIGEST = "cddb401e3b4751e9f1ccd4038486cacf663d61d9abafdeb3ba38def4ed75dcd1"


def canonical_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def corpus_digest(text: str = PINNED_CORPUS_JSON) -> str:
    """sha256 of the canonical re-serialization of a corpus JSON document"""
    return hashlib.sha256(canonical_json(json.loads(text)).encode("utf-8")).hexdigest()


class Corpus61(BaseModel):
    model_config = FROZEN

    vertices: List[SymMatrix]
    generators: Dict[str, Isometry]
    parabolic: Dict[str, Isometry]
    presentation: List[IsometryWord]
    parabolic_relators: List[IsometryWord]
    slots: List[str]
    center: SpacePoint

    def element(self, name: str) -> Isometry:
        """a, a^-1, u, ...: a named generator or its inverse"""
        table = {**self.generators, **self.parabolic}
        base = name[: -len("^-1")] if name.endswith("^-1") else name
        if base not in table:
            raise GeneratorSetError(f"unknown generator {name!r}")
        g = table[base]
        return g.inverse() if base != name else g

    def word(self, names: List[str]) -> IsometryWord:
        return IsometryWord(letters=[self.element(s) for s in names], names=list(names))

    def generator_set(self) -> GeneratorSet:
        return GeneratorSet(elements=[self.element(s) for s in self.slots], names=list(self.slots), center=self.center)

    def vertex_label(self, matrix: SymMatrix) -> int:
        """1-based index of the corpus vertex equal to matrix, 0 if none"""
        return next((i + 1 for i, v in enumerate(self.vertices) if v == matrix), 0)

    def fingerprint(self) -> Tuple[Any, ...]:
        return (
            tuple(v.key() for v in self.vertices),
            tuple((k, g.key()) for k, g in sorted(self.generators.items())),
            tuple((k, g.key()) for k, g in sorted(self.parabolic.items())),
            tuple(tuple(w.names) for w in self.presentation),
            tuple(tuple(w.names) for w in self.parabolic_relators),
            tuple(self.slots),
        )


def load_corpus(text: str = PINNED_CORPUS_JSON) -> Corpus61:
    data = json.loads(text)
    vertices = []
    for literal in data["vertices"]:
        v = as_vector(literal)
        outer = np.outer(v, v)
        vertices.append(SymMatrix(outer / sum(x * x for x in v)))
    generators = {k: Isometry(as_matrix(m)) for k, m in data["generators"].items()}
    parabolic = {k: Isometry(as_matrix(m)) for k, m in data["parabolic"].items()}
    table = {**generators, **parabolic}

    def word(names: List[str]) -> IsometryWord:
        letters = [table[s[:-3]].inverse() if s.endswith("^-1") else table[s] for s in names]
        return IsometryWord(letters=letters, names=list(names))

    corpus = Corpus61(
        vertices=vertices,
        generators=generators,
        parabolic=parabolic,
        presentation=[word(w) for w in data["relators"]["presentation"]],
        parabolic_relators=[word(w) for w in data["relators"]["parabolic"]],
        slots=list(data["slots"]),
        center=SpacePoint(identity(3)),
    )
    logger.debug("Loaded corpus with %d vertices", len(vertices))
    return corpus


def relator_check(word: IsometryWord) -> bool:
    """Exact product of the word is the identity"""
    return word.product().is_identity()


def unipotent_check(g: Isometry) -> bool:
    """(g - I)^3 = 0 exactly"""
    nil = g.matrix - identity(g.n)
    return bool(np.all(nil.dot(nil).dot(nil) == 0))
