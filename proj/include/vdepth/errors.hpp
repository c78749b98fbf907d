#pragma once

#include <stdexcept>
#include <string>

namespace vdepth {

// Base for every error raised by the library. Subclasses map onto the CLI
// exit codes (format errors exit 2, simulation errors exit 3).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Frame geometry mismatch between two frames or a frame and its stream.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Frame indices are not consecutive where the codec requires them to be.
class SequencingError : public Error {
 public:
  using Error::Error;
};

// A delta packet does not apply to the decoder's current reconstruction.
// Recovery is a keyframe request.
class DesyncError : public Error {
 public:
  using Error::Error;
};

// Malformed bytes: bad DEFLATE stream, truncated file, bad magic.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Invalid parameters (scene, link, policy).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Invalid session topology.
class TopologyError : public Error {
 public:
  using Error::Error;
};

}  // namespace vdepth
