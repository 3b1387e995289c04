"""Checkpoint files of a generator/discriminator pair.

A checkpoint starts with a magic line and the byte length of a YAML header.
The header lists, for each network, its layers and the name and shape of
every parameter and running-statistic block, plus the format version, seed,
network settings, parameter counts and free-form metadata. The blocks follow
in header order as little-endian 64-bit floats.

    PHISHGAN-CHECKPOINT
    <header length in bytes>
    <YAML header>
    <binary blocks>

No timestamps are stored: saving the same model twice yields identical bytes.
"""

from __future__ import annotations

import dataclasses
import logging
import os

import numpy as np
import yaml

from phishgan.autodiff.layers import LayerSpec, initial_buffers
from phishgan.autodiff.tensor import Tensor
from phishgan.errors import CheckpointError
from phishgan.networks.discriminator import DiscriminatorNet
from phishgan.networks.generator import GeneratorNet
from phishgan.networks.model import GanModel
from phishgan.networks.network import Network
from phishgan.settings import NetworkConfig

log = logging.getLogger(__name__)

MAGIC = b"PHISHGAN-CHECKPOINT\n"
FORMAT_VERSION = 1
DTYPE = np.dtype("<f8")

_NETWORKS = (("generator", GeneratorNet), ("discriminator", DiscriminatorNet))


def _network_header(network: Network) -> dict:
    return {
        "layers": [layer.to_dict() for layer in network.layers],
        "parameter_count": network.parameter_count(),
        "blocks": [
            {"name": name, "shape": list(array.shape)}
            for name, array in network.state_arrays().items()
        ],
    }


def checkpoint_header(model: GanModel) -> dict:
    header = {
        "format_version": FORMAT_VERSION,
        "seed": model.seed,
        "hyperparameters": dataclasses.asdict(model.config),
        "parameter_counts": model.parameter_counts(),
        "metadata": dict(model.metadata),
    }
    for key, _ in _NETWORKS:
        header[key] = _network_header(getattr(model, key))
    return header


def dumps(model: GanModel) -> bytes:
    header = yaml.safe_dump(
        checkpoint_header(model), sort_keys=False, default_flow_style=None
    ).encode("utf-8")
    parts = [MAGIC, f"{len(header)}\n".encode("ascii"), header]
    for key, _ in _NETWORKS:
        for array in getattr(model, key).state_arrays().values():
            parts.append(np.ascontiguousarray(array, dtype=DTYPE).tobytes())
    return b"".join(parts)


def save_checkpoint(model: GanModel, path: str | os.PathLike) -> None:
    """Write `model` to `path`."""
    with open(path, "wb") as file:
        file.write(dumps(model))
    log.info("Saved checkpoint %s", os.fspath(path))


def _malformed(reason: str) -> CheckpointError:
    return CheckpointError(
        f"malformed checkpoint ({reason}); expected a phishgan checkpoint in "
        f"format version {FORMAT_VERSION}"
    )


def _read_header(content: bytes) -> tuple[dict, int]:
    if not content.startswith(MAGIC):
        raise _malformed("missing magic line")
    offset = len(MAGIC)
    end = content.find(b"\n", offset)
    try:
        size = int(content[offset:end])
    except ValueError as error:
        raise _malformed("unreadable header length") from error
    start = end + 1
    try:
        header = yaml.safe_load(content[start : start + size].decode("utf-8"))
    except (UnicodeDecodeError, yaml.YAMLError) as error:
        raise _malformed("unreadable header") from error
    if not isinstance(header, dict):
        raise _malformed("header is not a mapping")
    version = header.get("format_version")
    if version != FORMAT_VERSION:
        msg = (
            f"unsupported checkpoint format version {version!r}; "
            f"this phishgan reads format version {FORMAT_VERSION}"
        )
        raise CheckpointError(msg)
    return header, start + size


def _empty_network(cls: type[Network], section: dict) -> Network:
    layers = [LayerSpec.from_dict(layer) for layer in section["layers"]]
    params = {}
    buffers = {}
    for layer in layers:
        for name, shape in layer.parameter_shapes().items():
            key = f"{layer.name}.{name}"
            params[key] = Tensor(np.zeros(shape), requires_grad=True, name=key)
        for name, value in initial_buffers(layer).items():
            buffers[f"{layer.name}.{name}"] = value
    return cls(layers, params, buffers)


def loads(content: bytes) -> GanModel:
    header, offset = _read_header(content)
    networks = {}
    try:
        for key, cls in _NETWORKS:
            section = header[key]
            network = _empty_network(cls, section)
            expected = {
                name: tuple(array.shape)
                for name, array in network.state_arrays().items()
            }
            declared = {block["name"]: tuple(block["shape"]) for block in section["blocks"]}
            if declared != expected or list(declared) != list(expected):
                raise _malformed(f"{key} blocks do not match its layers")
            arrays = {}
            for name, shape in declared.items():
                count = int(np.prod(shape))
                if offset + count * DTYPE.itemsize > len(content):
                    raise _malformed(f"block {name} is truncated")
                arrays[name] = (
                    np.frombuffer(content, dtype=DTYPE, count=count, offset=offset)
                    .astype(np.float64)
                    .reshape(shape)
                )
                offset += count * DTYPE.itemsize
            network.load_state_arrays(arrays)
            networks[key] = network
        config = NetworkConfig(**header["hyperparameters"])
    except (KeyError, TypeError, ValueError) as error:
        raise _malformed(f"incomplete header: {error}") from error
    if offset != len(content):
        raise _malformed(f"{len(content) - offset} trailing bytes")
    return GanModel(
        generator=networks["generator"],
        discriminator=networks["discriminator"],
        seed=int(header.get("seed", 0)),
        config=config,
        metadata=dict(header.get("metadata") or {}),
    )


def load_checkpoint(path: str | os.PathLike) -> GanModel:
    """Read a checkpoint written by `save_checkpoint`.

    Raises:
        CheckpointError: If the file is not a checkpoint, was written in
            another format version, or its blocks do not match its header.
    """
    try:
        with open(path, "rb") as file:
            content = file.read()
    except OSError as error:
        msg = f"cannot read checkpoint {os.fspath(path)}: {error}"
        raise CheckpointError(msg) from error
    model = loads(content)
    log.info("Loaded checkpoint %s", os.fspath(path))
    return model
