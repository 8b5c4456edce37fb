#pragma once

#include <stdexcept>
#include <string>

namespace qtmat {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
   using std::runtime_error::runtime_error;
};

/// a(z) + b(z) (or a single symbol to be inverted) vanishes on the unit circle.
class SymbolSingular : public Error {
public:
   using Error::Error;
};

/// An adaptive loop exceeded its size or iteration cap.
class NoConvergence : public Error {
public:
   using Error::Error;
};

/// Toeplitz part not invertible: symbol vanishes on the circle or has nonzero winding.
class NotInvertible : public Error {
public:
   using Error::Error;
};

/// A shift of an ADI/rational Krylov step lies in the essential spectrum.
class PoleInsideSpectrum : public Error {
public:
   using Error::Error;
};

/// Every new rational Arnoldi direction deflated.
class Breakdown : public Error {
public:
   using Error::Error;
};

/// Projected (small dense) Sylvester operator numerically singular.
class SingularProjection : public Error {
public:
   using Error::Error;
};

/// Fixed-point Stein iteration requested with ||M|| ||N|| >= 1.
class NotContractive : public Error {
public:
   using Error::Error;
};

/// Iteration limit reached before the residual target.
class MaxIter : public Error {
public:
   using Error::Error;
};

class UnknownMethod : public Error {
public:
   using Error::Error;
};

class InvalidInterval : public Error {
public:
   using Error::Error;
};

class InvalidArgument : public Error {
public:
   using Error::Error;
};

} // namespace qtmat
