import numpy as np
import pytest

from semrheo.embeddings import EmbeddingSet


def random_set(n_tokens: int, dims: int, seed: int = 0,
               f32: bool = False) -> EmbeddingSet:
    rng = np.random.default_rng(seed)
    matrix = rng.normal(size=(n_tokens, dims))
    if f32:
        matrix = matrix.astype(np.float32).astype(np.float64)
    tokens = [f"tok{i}" for i in range(n_tokens)]
    return EmbeddingSet(tokens, matrix)


@pytest.fixture
def toy_pair() -> EmbeddingSet:
    return EmbeddingSet(["a", "b"], np.array([[1.0, 0.0], [0.0, 1.0]]))
