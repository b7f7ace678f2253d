#include "lachesis/types.hpp"

namespace lachesis {

void advance_status(TaskStatus& status, TaskStatus next) {
    if (static_cast<int>(next) < static_cast<int>(status)) {
        throw InvalidStatusTransition(std::string("task status cannot move from ") +
                                      to_string(status) + " back to " + to_string(next));
    }
    status = next;
}

const char* to_string(TaskStatus status) {
    switch (status) {
    case TaskStatus::Unassigned: return "unassigned";
    case TaskStatus::Assigned: return "assigned";
    case TaskStatus::Running: return "running";
    case TaskStatus::Finished: return "finished";
    }
    return "?";
}

} // namespace lachesis
