'''exception kinds raised by the simulator, with the driver exit code of each'''


class SimulationError(Exception):
    exit_code = 2


class InvalidArgument(SimulationError, ValueError):
    pass


class InvalidInput(SimulationError, ValueError):
    pass


class DegenerateInput(SimulationError, ValueError):
    pass


class UnboundedResult(SimulationError, ArithmeticError):
    pass


class InfeasibleDrive(SimulationError):
    '''the requested PA drive level is above the PA output level'''
    pass


class ConfigError(SimulationError):
    exit_code = 1

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__('invalid configuration:\n  ' + '\n  '.join(self.errors))


class CheckFailed(SimulationError):
    exit_code = 3

    def __init__(self, failures):
        self.failures = list(failures)
        super().__init__('{:d} acceptance check(s) failed:\n  '.format(
            len(self.failures)) + '\n  '.join(self.failures))
