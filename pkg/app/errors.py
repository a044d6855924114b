"""Error hierarchy for the ChemNet toolkit.

Every error carries a short ``reason`` (its class name) which the harness
records in reject logs, and an ``exit_code`` used by the CLI.
"""

from __future__ import annotations


class ChemNetError(Exception):
    """Base class for all toolkit errors."""

    exit_code: int = 2

    @property
    def reason(self) -> str:
        return type(self).__name__


class DataError(ChemNetError):
    """Bad input data: molecules, files, labels, datasets."""

    exit_code = 2


class NumericError(ChemNetError):
    """Numerical failure during computation or training."""

    exit_code = 3


class ModelError(ChemNetError):
    """Invalid model construction or use."""

    exit_code = 3


# molgraph
class SmilesSyntaxError(DataError):
    """Malformed SMILES: unbalanced parentheses, ring closures, unknown symbols."""

    @property
    def reason(self) -> str:
        return "SyntaxError"


class ValenceError(DataError):
    """Bond-order sum exceeds the largest allowed valence of an element."""


class MissingParameter(DataError):
    """No Gasteiger parameters for an element."""


# descriptors
class NoHeavyAtoms(DataError):
    """Molecule has no heavy atom to describe or draw."""


class RegistryMismatch(DataError):
    """Normalization stats or vectors built against a different registry."""


class NonFiniteInput(DataError):
    """Label matrix contains NaN or infinite values."""


# imaging
class LayoutOverflow(DataError):
    """Molecule does not fit inside the image extent."""


class PixelCollision(DataError):
    """Two atoms map onto the same pixel."""


# textenc
class TooLong(DataError):
    """SMILES longer than the encoder sequence length."""


class UnknownCharacter(DataError):
    """Character not present in the vocabulary."""


# tensornet
class NonFiniteTensor(NumericError):
    """NaN or infinite value produced by a layer."""


class EmptyMask(NumericError):
    """Masked loss evaluated with no entries present."""


class ShapeMismatch(ModelError):
    """Tensor shape does not match what a layer or loss expects."""


class SpecError(ModelError):
    """Architecture spec cannot be built."""


class IndexOutOfRange(ModelError):
    """Segment index outside the model's segment map."""


class FormatError(DataError):
    """Model or vocabulary file is truncated or malformed."""


class VersionError(DataError):
    """Model file written by an unsupported format version."""


# harness
class SchemaError(DataError):
    """Dataset header does not contain the requested columns."""


class EmptyDataset(DataError):
    """No usable records after parsing."""


class TooSmall(DataError):
    """Dataset too small for the requested split."""


class OneClassOnly(DataError):
    """Binary labels contain a single class."""


class InvalidLabel(DataError):
    """Classification label outside {0, 1} or a label cell that is not a number."""


class ModalityMismatch(DataError):
    """Model input modality differs from the dataset encoding."""
