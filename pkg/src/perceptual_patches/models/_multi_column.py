from collections import OrderedDict as _OrderedDict
from typing import List as _List, Tuple as _Tuple

from ._base import Activations as _Activations, ConvLayer as _ConvLayer, \
    DensityModel as _DensityModel
from ._spec import ModelSpec as _ModelSpec, MULTI_COLUMN as _MULTI_COLUMN
from .. import autodiff as _ad


BRANCH_KERNELS = ((9, 7, 5), (7, 5, 3), (5, 3, 3))
"""The kernel sides of the three stages of each branch."""


class MultiColumnModel(_DensityModel):
    """Three branches with different receptive fields, each made of
    three convolutions with a 2x2 max pooling after the first two. The
    concatenated branch outputs ("features") are fused to one channel
    by a 1x1 convolution followed by relu. The output stride is 4.
    """

    __slots__ = ("_branches", "_fuse", "_names")

    def __init__(
        self,
        spec: _ModelSpec,
        dtype=_ad.DEFAULT_DTYPE,
        zero_head: bool = False
    ) -> None:
        """Build the layers.

        Args:
            spec (ModelSpec): The architecture; its family must be
                multi-column.
            dtype (DTypeLike, optional): The parameter precision.
            zero_head (bool, optional): Whether the fusion kernel starts
                at zero, which makes the untrained model predict zero
                everywhere. Defaults to False.

        Raises:
            ValueError: If the model spec describes another family.
        """
        if spec.family != _MULTI_COLUMN:
            raise ValueError(f"Expected a {_MULTI_COLUMN} spec.")
        super().__init__(spec, dtype)
        branches: _List[_Tuple[_ConvLayer, ...]] = list()
        names: _List[str] = list()
        for b, kernels in enumerate(BRANCH_KERNELS, start=1):
            c_in = spec.in_channels
            layers = list()
            for s, (k, c_out) in enumerate(zip(kernels, spec.widths), 1):
                name = f"branch{b}.conv{s}"
                layers.append(self._conv(name, c_in, c_out, k))
                c_in = c_out
                names.append(f"branch{b}.stage{s}")
                if s < len(kernels):
                    names.append(f"branch{b}.stage{s}.pool")
            branches.append(tuple(layers))
        self._branches = tuple(branches)
        fused = len(BRANCH_KERNELS) * spec.widths[-1]
        self._fuse = self._conv("fuse", fused, 1, 1, zero=zero_head)
        self._names = tuple(names) + ("features", "density")

    @property
    def layer_names(self) -> _Tuple[str, ...]:
        return self._names

    @property
    def resumable_layers(self) -> _Tuple[str, ...]:
        return ("features", "density")

    def _activations(self, x: _ad.Tensor) -> _Activations:
        acts: _Activations = _OrderedDict()
        outputs = list()
        for b, layers in enumerate(self._branches, start=1):
            h = x
            for s, conv in enumerate(layers, start=1):
                h = _ad.relu(conv(h))
                acts[f"branch{b}.stage{s}"] = h
                if s < len(layers):
                    h = _ad.maxpool2(h)
                    acts[f"branch{b}.stage{s}.pool"] = h
            outputs.append(h)
        features = _ad.concat_channels(outputs)
        acts["features"] = features
        acts["density"] = self._forward_from("features", features)
        return acts

    def _forward_from(self, layer: str, a: _ad.Tensor) -> _ad.Tensor:
        if layer == "density":
            return a
        return _ad.relu(self._fuse(a))
