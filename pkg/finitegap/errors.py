##### Exceptions #####

class InvalidGapSetError(ValueError):
  pass

class GapSetMismatchError(ValueError):
  pass

class ConfigError(ValueError):
  def __init__(self, message, key=None):
    super(ConfigError, self).__init__(message)
    self.key = key

class SpectrumProximityError(ValueError):
  pass

class GapEdgeError(ValueError):
  pass

class DegenerateGridError(ValueError):
  pass

class StabilityError(ValueError):
  pass

class NumericalError(ArithmeticError):
  pass

class StepSizeUnderflowError(NumericalError):
  def __init__(self, message, x=None, step=None):
    super(StepSizeUnderflowError, self).__init__(message)
    self.x = x
    self.step = step

class SingularBasisError(NumericalError):
  def __init__(self, message, residual=None):
    super(SingularBasisError, self).__init__(message)
    self.residual = residual

class BlowUpError(NumericalError):
  def __init__(self, message, time=None):
    super(BlowUpError, self).__init__(message)
    self.time = time
