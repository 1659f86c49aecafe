"""Embedding tables and their on-disk format.

A table maps node/object identifiers to dense float64 rows of one shared
dimension. Files carry a ``m=<dim> n=<rows>`` header followed by one
``id v_1 ... v_m`` line per row with round-trip float precision.
"""

from __future__ import annotations

import numpy as np

from .exceptions import InputError


class EmbeddingTable:
    """Mapping from identifiers to m-dimensional vectors."""

    def __init__(self, dim, ids=(), matrix=None):
        if dim < 1:
            raise ValueError("embedding dimension must be >= 1")
        self.dim = int(dim)
        self._ids = list(ids)
        self._index = {identifier: row for row, identifier in enumerate(self._ids)}
        if len(self._index) != len(self._ids):
            raise ValueError("duplicate identifiers in embedding table")
        if matrix is None:
            matrix = np.zeros((len(self._ids), self.dim), dtype=np.float64)
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.shape != (len(self._ids), self.dim):
            raise ValueError(f"matrix shape {matrix.shape} does not match {len(self._ids)} x {self.dim}")
        if not np.all(np.isfinite(matrix)):
            raise ValueError("embedding table contains non-finite values")
        self.matrix = matrix

    @classmethod
    def from_dict(cls, dim, rows):
        ids = list(rows)
        matrix = np.asarray([rows[i] for i in ids], dtype=np.float64)
        if matrix.size == 0:
            matrix = matrix.reshape(0, dim)
        return cls(dim, ids, matrix)

    @property
    def ids(self):
        return list(self._ids)

    def row_of(self, identifier):
        return self._index[identifier]

    def vector(self, identifier):
        if identifier not in self._index:
            raise KeyError(identifier)
        return self.matrix[self._index[identifier]]

    def __contains__(self, identifier):
        return identifier in self._index

    def __len__(self):
        return len(self._ids)

    def copy(self):
        return EmbeddingTable(self.dim, self._ids, self.matrix.copy())


def save_embeddings(table, path, id_formatter=str):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"m={table.dim} n={len(table)}\n")
        for identifier in table.ids:
            row = table.vector(identifier)
            fh.write(id_formatter(identifier))
            for value in row:
                fh.write(" " + repr(float(value)))
            fh.write("\n")


def load_embeddings(path, id_parser=str):
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        try:
            m_part, n_part = header.split()
            dim = int(m_part.split("=", 1)[1])
            n = int(n_part.split("=", 1)[1])
        except (ValueError, IndexError) as exc:
            raise InputError(f"{path}:1: expected 'm=<dim> n=<rows>' header, got {header!r}") from exc
        ids = []
        rows = []
        for lineno, line in enumerate(fh, start=2):
            fields = line.split()
            if not fields:
                continue
            if len(fields) != dim + 1:
                raise InputError(f"{path}:{lineno}: expected id + {dim} values, got {len(fields)} fields")
            ids.append(id_parser(fields[0]))
            rows.append([float(v) for v in fields[1:]])
    if len(ids) != n:
        raise InputError(f"{path}: header declares {n} rows, found {len(ids)}")
    matrix = np.asarray(rows, dtype=np.float64).reshape(len(ids), dim)
    try:
        return EmbeddingTable(dim, ids, matrix)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc


def save_user_embeddings(table, net, path):
    """Persist a user table keyed by unified ids under src:/tgt: local ids.

    An anchor-merged node is written once per identity it covers, so both
    networks can address its shared vector.
    """
    prefixes = {net.source_id: "src", net.target_id: "tgt"}
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"m={table.dim} n={len(net.node_ids)}\n")
        for (network_id, local), uid in net.node_ids.items():
            row = table.vector(uid)
            fh.write(f"{prefixes[network_id]}:{local}")
            for value in row:
                fh.write(" " + repr(float(value)))
            fh.write("\n")
