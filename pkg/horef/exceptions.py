# Copyright Notice:
# Copyright 2026 horef contributors. All rights reserved.
# License: BSD 3-Clause License. For full text see LICENSE.md

# Exceptions thrown by the refactoring pipeline

class ConfigurationError(Exception):
    pass

class ParseError(Exception):
    """
    Raised when program or library text does not parse.

    Carries the list of ParseDiagnostic objects; the message is the first
    error diagnostic.
    """
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        first = self.diagnostics[0] if self.diagnostics else 'parse failed'
        super(ParseError, self).__init__(str(first))

class LibraryError(ParseError):
    pass

class AbstractionError(Exception):
    pass

class ModelError(Exception):
    pass

class RefactoringError(Exception):
    pass

class SpecializationError(Exception):
    pass

class UnresolvedSymbolError(Exception):
    def __init__(self, symbols):
        self.symbols = sorted(symbols)
        names = ', '.join(str(s) for s in self.symbols)
        super(UnresolvedSymbolError, self).__init__('Unresolved predicate symbols: {0}'.format(names))

class UniverseError(Exception):
    pass

class VerificationError(Exception):
    def __init__(self, result):
        self.result = result
        super(VerificationError, self).__init__(result.describe())
