from collections import OrderedDict as _OrderedDict
from typing import List as _List, Tuple as _Tuple

from ._base import Activations as _Activations, ConvLayer as _ConvLayer, \
    DensityModel as _DensityModel
from ._spec import ModelSpec as _ModelSpec, \
    SINGLE_COLUMN as _SINGLE_COLUMN
from .. import autodiff as _ad


FRONT_STAGES = 4
"""The number of plain 3x3 convolutions; the first three are followed
by 2x2 max pooling.
"""

BACK_STAGES = 3
"""The number of dilated 3x3 convolutions."""


class SingleColumnModel(_DensityModel):
    """A single column of 3x3 convolutions whose back end is dilated
    instead of branching. A 1x1 convolution with relu produces the
    density map. The output stride is 8.
    """

    __slots__ = ("_stages", "_head", "_names")

    def __init__(
        self,
        spec: _ModelSpec,
        dtype=_ad.DEFAULT_DTYPE,
        zero_head: bool = False
    ) -> None:
        """Build the layers.

        Args:
            spec (ModelSpec): The architecture; its family must be
                single-column.
            dtype (DTypeLike, optional): The parameter precision.
            zero_head (bool, optional): Whether the head kernel starts
                at zero. Defaults to False.

        Raises:
            ValueError: If the model spec describes another family.
        """
        if spec.family != _SINGLE_COLUMN:
            raise ValueError(f"Expected a {_SINGLE_COLUMN} spec.")
        super().__init__(spec, dtype)
        stages: _List[_Tuple[str, _ConvLayer, bool]] = list()
        names: _List[str] = list()
        c_in = spec.in_channels
        for i, c_out in enumerate(spec.widths):
            if i < FRONT_STAGES:
                name = f"front{i + 1}"
                conv = self._conv(name, c_in, c_out, 3)
                pool = i < FRONT_STAGES - 1
            else:
                name = f"back{i - FRONT_STAGES + 1}"
                conv = self._conv(name, c_in, c_out, 3, spec.dilation)
                pool = False
            stages.append((name, conv, pool))
            names.append(name)
            if pool:
                names.append(f"{name}.pool")
            c_in = c_out
        self._stages = tuple(stages)
        self._head = self._conv("head", c_in, 1, 1, zero=zero_head)
        self._names = tuple(names) + ("density",)

    @property
    def layer_names(self) -> _Tuple[str, ...]:
        return self._names

    @property
    def resumable_layers(self) -> _Tuple[str, ...]:
        return self._names

    def _run(
        self, x: _ad.Tensor, start: int, acts: _Activations
    ) -> _ad.Tensor:
        """Run the stages from index `start` on and the head."""
        h = x
        for name, conv, pool in self._stages[start:]:
            h = _ad.relu(conv(h))
            acts[name] = h
            if pool:
                h = _ad.maxpool2(h)
                acts[f"{name}.pool"] = h
        return _ad.relu(self._head(h))

    def _activations(self, x: _ad.Tensor) -> _Activations:
        acts: _Activations = _OrderedDict()
        acts["density"] = self._run(x, 0, acts)
        return acts

    def _forward_from(self, layer: str, a: _ad.Tensor) -> _ad.Tensor:
        if layer == "density":
            return a
        stage, _, suffix = layer.partition(".")
        index = [s[0] for s in self._stages].index(stage)
        if not suffix and self._stages[index][2]:
            a = _ad.maxpool2(a)
        return self._run(a, index + 1, _OrderedDict())
