#pragma once

#include "epimem/mem_write.hpp"
#include "epimem/qa_gen.hpp"
#include "epimem/traj_model.hpp"

#include <nlohmann/json.hpp>

namespace epimem::detail {

nlohmann::json to_json(const EventFact& e);
nlohmann::json to_json(const Step& s);
nlohmann::json to_json(const Trajectory& t);
nlohmann::json to_json(const ArchiveItem& a);
nlohmann::json to_json(const MemoryUnit& u);
nlohmann::json to_json(const QAItem& q);

EventFact event_from_json(const nlohmann::json& j);
Step step_from_json(const nlohmann::json& j);
Trajectory trajectory_from_json(const nlohmann::json& j);
ArchiveItem archive_item_from_json(const nlohmann::json& j);
QAItem qa_from_json(const nlohmann::json& j);

}  // namespace epimem::detail
