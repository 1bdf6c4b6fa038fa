"""Exception types shared across the package."""


class PfsdmError(Exception):
    """Base class for all pfsdm failures."""


class MultipleComponents(PfsdmError):
    """Thresholded image has zero or more than one foreground component."""


class BorderContact(PfsdmError):
    """Foreground region touches the image border."""


class DegenerateShape(PfsdmError):
    """Contour encloses no area or collapses to a point."""


class InvalidKind(PfsdmError):
    """Unknown synthetic shape family name."""


class OutOfDomain(PfsdmError):
    """A point or contour leaves the computational domain (-1,1)^2."""


class IllConditioned(PfsdmError):
    """Least-squares system is rank deficient or underdetermined."""


class SolverDiverged(PfsdmError):
    """Nonlinear solve produced a non-finite loss."""


class UndefinedProjection(PfsdmError):
    """Closest-point projection onto the unit circle is ambiguous at the origin."""


class IncompatibleCurves(PfsdmError):
    """Moment curves disagree in radial grid or moment order."""


class DegenerateCohort(PfsdmError):
    """A moment normalizing constant vanished over the whole cohort."""


class DegenerateEmbedding(PfsdmError):
    """PCA input carries no variance."""


class SingletonClass(PfsdmError):
    """A class with a single member cannot be scored."""


class InputFormatError(PfsdmError):
    """Malformed input file (contour CSV, PGM, JSON artifact, manifest)."""
