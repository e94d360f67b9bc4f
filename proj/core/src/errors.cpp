#include "irfad/errors.hpp"

namespace irfad {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::shape: return "shape";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::contract: return "contract";
    case ErrorKind::undefined_metric: return "undefined_metric";
    case ErrorKind::training_diverged: return "training_diverged";
    case ErrorKind::checkpoint_version: return "checkpoint_version";
    case ErrorKind::checkpoint_schedule: return "checkpoint_schedule";
    case ErrorKind::checkpoint_corrupt: return "checkpoint_corrupt";
    case ErrorKind::data: return "data";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
    }
    return "unknown";
}

} // namespace irfad
