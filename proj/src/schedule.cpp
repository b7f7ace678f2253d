#include "lachesis/schedule.hpp"

namespace lachesis {

const Placement& ScheduleRecord::primary(TaskIndex t) const {
    for (const Placement& p : placements_[t]) {
        if (!p.is_duplicate) return p;
    }
    throw ParentUnplaced("task has no primary placement");
}

} // namespace lachesis
