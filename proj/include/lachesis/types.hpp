#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace lachesis {

using NodeId = std::uint32_t;
using JobId = std::uint32_t;
using ExecutorId = std::uint32_t;

// Dense index into a TaskGraph spanning all jobs of a workload.
using TaskIndex = std::size_t;

inline constexpr TaskIndex kNoTask = static_cast<TaskIndex>(-1);

enum class TaskStatus : std::uint8_t { Unassigned, Assigned, Running, Finished };

struct SchedulerError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CycleDetected : SchedulerError { using SchedulerError::SchedulerError; };
struct DanglingEdge : SchedulerError { using SchedulerError::SchedulerError; };
struct DuplicateNodeId : SchedulerError { using SchedulerError::SchedulerError; };
struct InvalidJob : SchedulerError { using SchedulerError::SchedulerError; };
struct UnknownExecutor : SchedulerError { using SchedulerError::SchedulerError; };
struct OverlapRejected : SchedulerError { using SchedulerError::SchedulerError; };
struct ParentUnplaced : SchedulerError { using SchedulerError::SchedulerError; };
struct NotAParent : SchedulerError { using SchedulerError::SchedulerError; };
struct EmptyFrontier : SchedulerError { using SchedulerError::SchedulerError; };
struct DimMismatch : SchedulerError { using SchedulerError::SchedulerError; };
struct TapeMismatch : SchedulerError { using SchedulerError::SchedulerError; };
struct NonFiniteGradient : SchedulerError { using SchedulerError::SchedulerError; };
struct PolicyReturnedNonFrontierNode : SchedulerError { using SchedulerError::SchedulerError; };
struct ContinuousModeUnsupported : SchedulerError { using SchedulerError::SchedulerError; };
struct IncompleteSchedule : SchedulerError { using SchedulerError::SchedulerError; };
struct EmptySamples : SchedulerError { using SchedulerError::SchedulerError; };
struct InvalidSpec : SchedulerError { using SchedulerError::SchedulerError; };
struct ParseError : SchedulerError { using SchedulerError::SchedulerError; };
struct InvalidStatusTransition : SchedulerError { using SchedulerError::SchedulerError; };
struct IoError : SchedulerError { using SchedulerError::SchedulerError; };

// Task lifecycle moves forward only: unassigned -> assigned -> running -> finished.
// Skipping a stage forward is allowed (the simulator never replays intermediate
// states it did not observe); moving backward is not.
void advance_status(TaskStatus& status, TaskStatus next);

const char* to_string(TaskStatus status);

} // namespace lachesis
