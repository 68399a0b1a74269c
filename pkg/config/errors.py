from typing import Any, Dict


class ErrorMessages:
    """A helper class for managing error messages and responses."""

    # Category shorthands
    shorthands = {
        'pre': '[precondition]',
        'bug': '[internal]',
        'cert': '[certificate]',
        'io': '[input]',
    }

    # Error messages
    errors = {
        # Interval engine
        'malformed_interval': "{io} Interval [{lo}, {hi}] has lo > hi.",
        'zero_scale': "{pre} Affine image needs a nonzero scale.",
        'degenerate_interval': "{pre} Density within [{lo}, {hi}] is undefined: the interval has measure 0.",
        'bad_fraction': "{pre} Keep fraction {value} must lie strictly between 0 and 1.",
        'bad_gaps': "{pre} Cannot remove measure {removed} with {count} gaps from a base of length {length}.",
        'unknown_operation': "{io} Unknown {what} '{name}'; expected one of {choices}.",

        # Sequences
        'not_decreasing': "{io} Explicit sequence is not strictly decreasing and positive at index {index}.",
        'prefix_too_short': "{pre} Prefix of length {length} is too short for N = {N}.",
        'prefix_too_long': "{pre} Refusing to materialize {length} terms (limit {limit}).",
        'hypothesis_fails': "{pre} max a(n+N)/a(n) = {ratio} is not below 1; no delta exists.",
        'bad_sequence_spec': "{io} Bad sequence spec: {detail}",

        # Embedder
        'ratio_hypothesis_fails': "{pre} a({n}+N)/a({n}) = {ratio} is not below delta^N = {bound}.",
        'precondition_violated': "{pre} Precondition failed: {inequality}.",
        'infeasible': "{bug} No admissible translation in [0, {bound}] although the counting bound guarantees one.",
        'density_too_low': "{pre} Block {block} has rho = {rho}, not below {threshold}; no admissible p in the prefix.",
        'head_selection_fails': "{pre} E above {floor} holds fewer than {needed} usable points.",

        # Avoider
        'sup_not_attained': "{pre} Gap supremum at n = {n} may lie beyond the prefix (max in prefix {gap}, tail bound {tail}).",
        'no_admissible_index': "{pre} Row k = {k}: no index n > {start} in the prefix has relative gap <= {threshold}.",
        'depth_too_small': "{pre} Avoidance depth {depth} has no row with k > C*L = {bound}.",
        'inequality_fails': "{cert} Check {check} failed: {detail}",

        # Uniform
        'delta_too_large': "{pre} delta = {delta} exceeds the allowed bound {bound}.",
        'ratio_too_large': "{pre} a({n})/a({m}) = {ratio} is below 4.",
        'not_found': "{bug} No subinterval pair found on level {level} although the density bound guarantees one.",
        'measure_too_small': "{pre} Measure {measure} is not above 1/2 + 4*delta = {bound}.",
        'depth_exceeds_prefix': "{pre} Depth {depth} exceeds the prefix length {length}.",

        # Gluer
        'no_admissible_scale': "{pre} No scale window up to {n_max} reaches density {threshold} (best {best} at n = {n}).",
        'connector_slope': "{bug} Connector slope {slope} on scale {n} lies outside [{lo}, {hi}].",
        'non_monotone_map': "{bug} Map breakpoints are not strictly increasing at position {index}: {detail}",

        # Front-end
        'parse_error': "{io} Could not parse {what}: {detail}",
        'io_error': "{io} Could not access {path}: {detail}",
        'config_error': "{io} Bad configuration: {detail}",
        'certificate_failed': "{cert} {count} certificate check(s) failed.",
        'generic': "{bug} Something broke: {detail}",
    }

    # Warning messages
    warnings = {
        'partial_materialization': "Avoidance set materialized to depth {set_depth} of {depth}; deeper rows are checked arithmetically.",
        'uncertified_sup': "Gap-ratio sup {C} is a prefix statistic only; the certificate is scoped to the prefix.",
        'no_target_set': "No target set given; membership checks for the {kind} report are skipped.",
    }

    # Info messages
    info = {
        'report_written': "Report written to {path}.",
        'plot_written': "Plot written to {path}.",
        'all_passed': "All {count} certificate checks passed.",
        'verified': "Re-verified {kind} report: {count} checks, {failed} failed.",
    }

    @classmethod
    def _format(cls, message: str, **kwargs) -> str:
        """Format a message with shorthands and additional context."""
        # First replace shorthands
        for key, value in cls.shorthands.items():
            message = message.replace(f"{{{key}}}", value)

        # Then replace any additional context
        for key, value in kwargs.items():
            message = message.replace(f"{{{key}}}", str(value))

        return message

    @classmethod
    def get_error(cls, error_type: str, **kwargs) -> str:
        """Get the error message of the specified type."""
        if error_type not in cls.errors:
            return cls._format("{bug} An unknown error occurred ({key}).", key=error_type)
        return cls._format(cls.errors[error_type], **kwargs)

    @classmethod
    def get_warning(cls, warning_type: str, **kwargs) -> str:
        """Get the warning message of the specified type."""
        if warning_type not in cls.warnings:
            return cls._format("An unknown warning occurred ({key}).", key=warning_type)
        return cls._format(cls.warnings[warning_type], **kwargs)

    @classmethod
    def get_info(cls, info_type: str, **kwargs) -> str:
        """Get the info message of the specified type."""
        if info_type not in cls.info:
            return cls._format("Information not available ({key}).", key=info_type)
        return cls._format(cls.info[info_type], **kwargs)


# Exit statuses
EXIT_OK = 0
EXIT_CERTIFICATE = 2
EXIT_PRECONDITION = 3
EXIT_INPUT = 4


class BiLipError(Exception):
    """Base exception; the message comes from the ErrorMessages catalog."""

    error_key = 'generic'
    exit_status = EXIT_CERTIFICATE

    def __init__(self, error_key: str = '', **kwargs):
        self.code = error_key or self.error_key
        self.context: Dict[str, Any] = {key: str(value) for key, value in kwargs.items()}
        self.message = ErrorMessages.get_error(self.code, **kwargs)
        super().__init__(self.message)

    def to_dict(self) -> dict:
        """Machine-readable form for reports."""
        return {
            'error': type(self).__name__,
            'code': self.code,
            'message': self.message,
            'context': self.context,
        }


class PreconditionError(BiLipError):
    """A hypothesis of a construction does not hold for the given input."""
    exit_status = EXIT_PRECONDITION


class InternalError(BiLipError):
    """Something the proof guarantees did not happen."""
    exit_status = EXIT_CERTIFICATE


class CertificateFailure(BiLipError):
    """An exact inequality recorded in a certificate does not hold."""
    exit_status = EXIT_CERTIFICATE


class InputError(BiLipError):
    """Unreadable or malformed input."""
    exit_status = EXIT_INPUT


class MalformedInterval(InputError):
    error_key = 'malformed_interval'


class ParseError(InputError):
    error_key = 'parse_error'


class ConfigError(InputError):
    error_key = 'config_error'


class NotDecreasing(InputError):
    error_key = 'not_decreasing'


class UnknownOperation(InputError):
    error_key = 'unknown_operation'


class ZeroScale(PreconditionError):
    error_key = 'zero_scale'


class DegenerateInterval(PreconditionError):
    error_key = 'degenerate_interval'


class BadFraction(PreconditionError):
    error_key = 'bad_fraction'


class PrefixTooShort(PreconditionError):
    error_key = 'prefix_too_short'


class PrefixTooLong(PreconditionError):
    error_key = 'prefix_too_long'


class HypothesisFails(PreconditionError):
    error_key = 'hypothesis_fails'


class RatioHypothesisFails(PreconditionError):
    error_key = 'ratio_hypothesis_fails'


class PreconditionViolated(PreconditionError):
    error_key = 'precondition_violated'


class DensityTooLow(PreconditionError):
    error_key = 'density_too_low'


class HeadSelectionFails(PreconditionError):
    error_key = 'head_selection_fails'


class SupNotAttainedInPrefix(PreconditionError):
    error_key = 'sup_not_attained'


class NoAdmissibleIndex(PreconditionError):
    error_key = 'no_admissible_index'


class DepthTooSmall(PreconditionError):
    error_key = 'depth_too_small'


class DeltaTooLarge(PreconditionError):
    error_key = 'delta_too_large'


class RatioTooLarge(PreconditionError):
    error_key = 'ratio_too_large'


class MeasureTooSmall(PreconditionError):
    error_key = 'measure_too_small'


class DepthExceedsPrefix(PreconditionError):
    error_key = 'depth_exceeds_prefix'


class NoAdmissibleScale(PreconditionError):
    error_key = 'no_admissible_scale'


class Infeasible(InternalError):
    error_key = 'infeasible'


class NotFound(InternalError):
    error_key = 'not_found'


class ConnectorSlopeOutOfRange(InternalError):
    error_key = 'connector_slope'


class InequalityFails(CertificateFailure):
    error_key = 'inequality_fails'


class NonMonotoneMap(InternalError):
    error_key = 'non_monotone_map'
