"""Exception hierarchy shared by every layer."""


class MixMultError(Exception):
    """Base class; the CLI embeds these per task instead of aborting."""

    code = "MixMultError"

    def __init__(self, message=""):
        super().__init__(message)
        self.message = message


def _make(name, doc):
    cls = type(name, (MixMultError,), {"__doc__": doc, "code": name})
    return cls


RingMismatch = _make("RingMismatch", "Operands live in different ring contexts.")
NonHomogeneous = _make("NonHomogeneous", "A generator or element is not homogeneous of the required degree.")
TypeTooSmall = _make("TypeTooSmall", "Requested type has total degree below the support dimension.")
NotMMSystem = _make("NotMMSystem", "Sequence is not a mixed multiplicity system of the module.")
GenericityExhausted = _make("GenericityExhausted", "Sample-and-test ran out of retries.")
DimDropFails = _make("DimDropFails", "Quotient by the element does not drop the support dimension.")
HypothesisFailed = _make("HypothesisFailed", "A hypothesis required by the checked formula does not hold.")
StabilizationUncertain = _make("StabilizationUncertain", "Grid values did not validate as polynomial on the window.")
StabilizationError = _make("StabilizationError", "Koszul homology lengths failed to stabilize within budget.")
InfiniteLength = _make("InfiniteLength", "A quotient expected to have finite length does not.")
ZeroLeadingForm = _make("ZeroLeadingForm", "Element has zero image in the associated graded piece.")
NotSuperficialSequence = _make("NotSuperficialSequence", "A sequence element failed the superficial grid test.")
NotPrimary = _make("NotPrimary", "J does not contain a power of the maximal ideal.")
NonIntegralMultiplicity = _make("NonIntegralMultiplicity", "Internal consistency failure: non-integral multiplicity.")
InternalConsistencyError = _make("InternalConsistencyError", "Two routes that must agree did not.")
BoxOverflow = _make("BoxOverflow", "Lattice oracle bounding box is too large.")


class ParseError(MixMultError):
    code = "ParseError"

    def __init__(self, message, line=0, column=0):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.reason = message
