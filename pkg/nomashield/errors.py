class NomaShieldError(Exception):
    exit_code = 1


class ConfigError(NomaShieldError, ValueError):
    exit_code = 2

    def __init__(self, field:str, message:str):
        self.field = field
        super().__init__(f'{field}: {message}')


class DomainError(ValueError):
    pass


class NumericalError(NomaShieldError, ArithmeticError):
    exit_code = 3


class AlignmentError(NumericalError):
    pass


class IllConditionedError(NumericalError):

    def __init__(self, cond:float, limit:float):
        self.cond = cond
        super().__init__(
            f'G is ill-conditioned (cond={cond:.3e} > {limit:.0e})')


class OutputError(NomaShieldError, OSError):
    exit_code = 4


class VerificationError(NomaShieldError):
    exit_code = 1
