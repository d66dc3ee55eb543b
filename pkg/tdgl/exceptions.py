''' tdgl exceptions '''
# -*- coding: utf-8 -*-


class TDGLError(Exception):
    ''' Base class of every error raised by tdgl '''
    exit_code = 1

    def to_dict(self):
        return {
            'error': type(self).__name__,
            'message': str(self),
            'exit_code': self.exit_code,
        }


class InvalidArgument(TDGLError, ValueError):
    exit_code = 2


class ConfigValidationError(InvalidArgument):
    ''' Collects every violation found in a simulation document '''

    def __init__(self, violations):
        self.violations = list(violations)
        summary = '; '.join('%s: %s' % (item['path'], item['message']) for item in self.violations)
        super().__init__('invalid configuration: %s' % summary)

    def to_dict(self):
        data = super().to_dict()
        data['violations'] = self.violations
        return data


class NumericalFailure(TDGLError, RuntimeError):
    ''' A Krylov or eigen solver did not reach its tolerance '''
    exit_code = 4

    def __init__(self, message, residual=None, iterations=None):
        self.residual = residual
        self.iterations = iterations
        super().__init__(message)

    def to_dict(self):
        data = super().to_dict()
        data['residual'] = self.residual
        data['iterations'] = self.iterations
        return data


class RecordError(TDGLError):
    ''' A stored run is missing files or holds corrupt data '''
    exit_code = 5

    def __init__(self, message, path=None):
        self.path = None if path is None else str(path)
        super().__init__(message)

    def to_dict(self):
        data = super().to_dict()
        data['path'] = self.path
        return data
