import abc as _abc
import math as _math
import numpy as _np

from collections import OrderedDict as _OrderedDict
from dataclasses import dataclass as _dataclass
from typing import Dict as _Dict, Iterator as _Iterator, \
    Mapping as _Mapping, Tuple as _Tuple, Union as _Union

from . import _exceptions
from ._spec import ModelSpec as _ModelSpec
from .. import autodiff as _ad
from .. import tools as _tools


Activations = _Dict[str, _ad.Tensor]
"""Named intermediate results of a forward pass in execution order. The
final entry is "density".
"""

ImageLike = _Union[_ad.Tensor, _np.ndarray]
"""An image as a tensor or array of shape [1, C, H, W] or [C, H, W]."""


@_dataclass(frozen=True)
class ConvLayer:
    """A convolution with its parameters."""

    __slots__ = ("name", "weight", "bias", "dilation")

    name: str
    """The parameter name prefix."""

    weight: _ad.Tensor
    """The kernel of shape [K, C, k, k]."""

    bias: _ad.Tensor
    """The bias of shape [K]."""

    dilation: int
    """The kernel dilation."""

    def __call__(self, x: _ad.Tensor) -> _ad.Tensor:
        return _ad.conv2d(x, self.weight, self.bias, self.dilation)


class DensityModel(_abc.ABC):
    """Base class of the toy density map estimation networks. A model
    maps an image of shape [1, C, H, W] to a non-negative density map
    of shape [1, 1, H / s, W / s] where s is the output stride.
    """

    __slots__ = ("_spec", "_params", "_dtype")

    def __init__(self, spec: _ModelSpec, dtype=_ad.DEFAULT_DTYPE) -> None:
        """Initialize the parameter registry.

        Args:
            spec (ModelSpec): The architecture.
            dtype (DTypeLike, optional): The parameter precision.
                Defaults to float32.
        """
        self._spec = spec
        self._params: "_OrderedDict[str, _ad.Tensor]" = _OrderedDict()
        """The parameters in creation order."""
        self._dtype = _np.dtype(dtype)

    def _conv(
        self,
        name: str,
        c_in: int,
        c_out: int,
        size: int,
        dilation: int = 1,
        zero: bool = False
    ) -> ConvLayer:
        """Create and register a convolution. Kernels are drawn
        uniformly from +-sqrt(1 / fan_in) with a stream derived from the
        spec seed and the layer index; biases start at zero.

        Args:
            name (str): The parameter name prefix.
            c_in (int): The input channels.
            c_out (int): The output channels.
            size (int): The odd kernel side.
            dilation (int, optional): The dilation. Defaults to 1.
            zero (bool, optional): Whether to initialize the kernel with
                zeros. Defaults to False.

        Returns:
            ConvLayer: The layer.
        """
        index = len(self._params) // 2
        shape = (c_out, c_in, size, size)
        if zero:
            w = _np.zeros(shape)
        else:
            bound = _math.sqrt(1.0 / (c_in * size * size))
            rng = _tools.derive_rng(self._spec.seed, index)
            w = rng.uniform(-bound, bound, size=shape)
        weight = _ad.Tensor(w, dtype=self._dtype)
        bias = _ad.Tensor(_np.zeros(c_out), dtype=self._dtype)
        self._params[f"{name}.weight"] = weight
        self._params[f"{name}.bias"] = bias
        return ConvLayer(name, weight, bias, dilation)

    @property
    def spec(self) -> _ModelSpec:
        """The architecture."""
        return self._spec

    @property
    def output_stride(self) -> int:
        """The ratio of input to output resolution."""
        return self._spec.output_stride

    @property
    def dtype(self) -> _np.dtype:
        """The parameter precision."""
        return self._dtype

    @property
    @_abc.abstractmethod
    def layer_names(self) -> _Tuple[str, ...]:
        """The names of all activations in execution order."""
        ...

    @property
    @_abc.abstractmethod
    def resumable_layers(self) -> _Tuple[str, ...]:
        """The activations `forward_from` may start from."""
        ...

    def parameters(self) -> "_OrderedDict[str, _ad.Tensor]":
        """The parameters in creation order. The returned mapping is a
        copy; the tensors are shared.
        """
        return _OrderedDict(self._params)

    def __iter__(self) -> _Iterator[_ad.Tensor]:
        return iter(self._params.values())

    def num_parameters(self) -> int:
        """The total number of scalar parameters."""
        return sum(p.size for p in self._params.values())

    def set_requires_grad(self, flag: bool) -> None:
        """Switch gradient recording for all parameters. Models are
        created frozen.
        """
        for p in self._params.values():
            p.requires_grad = flag
            p.zero_grad()

    def state_dict(self) -> "_OrderedDict[str, _np.ndarray]":
        """Copies of the parameter values."""
        return _OrderedDict((k, p.numpy()) for k, p in self._params.items())

    def load_state_dict(self, state: _Mapping[str, _np.ndarray]) -> None:
        """Replace the parameter values.

        Args:
            state (Mapping[str, ndarray]): The values per name.

        Raises:
            KeyError: If the names do not match the model.
            ValueError: If a shape does not match.
        """
        if set(state) != set(self._params):
            diff = sorted(set(self._params) ^ set(state))
            raise KeyError(f"Parameter names do not match: {diff}")
        for name, p in self._params.items():
            values = _np.asarray(state[name])
            if values.shape != p.shape:
                raise ValueError(
                    f"Shape of {name!r} is {values.shape}, "
                    f"expected {p.shape}."
                )
            p.data = values.astype(self._dtype, copy=True)

    def copy(self) -> "DensityModel":
        """Create an independent model with equal parameters."""
        clone = type(self)(self._spec, dtype=self._dtype)
        clone.load_state_dict(self.state_dict())
        return clone

    def _as_input(self, image: ImageLike) -> _ad.Tensor:
        """Check an image and turn it into a 4-D tensor.

        Raises:
            ShapeMismatchError: If the channel count does not match or
                the spatial dims are not divisible by the output stride.
        """
        if not isinstance(image, _ad.Tensor):
            arr = _np.asarray(image)
            if arr.ndim == 3:
                arr = arr[None]
            image = _ad.Tensor(arr, dtype=self._dtype)
        if image.ndim != 4 or image.shape[1] != self._spec.in_channels:
            raise _ad.ShapeMismatchError(
                f"Expected an image of shape [N, {self._spec.in_channels}, "
                f"H, W], got {image.shape}."
            )
        s = self.output_stride
        h, w = image.shape[2:]
        if h % s != 0 or w % s != 0:
            raise _ad.ShapeMismatchError(
                f"Image dims {h}x{w} are not divisible by the output "
                f"stride {s}."
            )
        return image

    @_abc.abstractmethod
    def _activations(self, x: _ad.Tensor) -> Activations:
        ...

    @_abc.abstractmethod
    def _forward_from(self, layer: str, a: _ad.Tensor) -> _ad.Tensor:
        ...

    def activations(self, image: ImageLike) -> Activations:
        """Run the network and keep every named activation.

        Args:
            image (ImageLike): The input image.

        Raises:
            ShapeMismatchError: If the image shape is invalid.

        Returns:
            Activations: The activations, ending with "density".
        """
        return self._activations(self._as_input(image))

    def forward(self, image: ImageLike) -> _ad.Tensor:
        """Predict the density map.

        Args:
            image (ImageLike): The input image.

        Raises:
            ShapeMismatchError: If the image shape is invalid.

        Returns:
            Tensor: The non-negative map of shape [1, 1, H / s, W / s].
        """
        return self.activations(image)["density"]

    __call__ = forward

    def forward_from(self, layer: str, a: _ad.Tensor) -> _ad.Tensor:
        """Compute the density map from the activation of a layer.

        Args:
            layer (str): One of `resumable_layers`.
            a (Tensor): The activation of that layer.

        Raises:
            UnknownLayerError: If the layer cannot be resumed from.

        Returns:
            Tensor: The density map.
        """
        if layer not in self.resumable_layers:
            raise _exceptions.UnknownLayerError(layer)
        return self._forward_from(layer, a)

    def count(self, image: ImageLike) -> float:
        """The predicted head count, the sum of the output map."""
        pred = self.forward(image)
        return float(pred.data.sum(dtype=_np.float64))
