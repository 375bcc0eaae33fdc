#include "epimem/traj_model.hpp"

#include "epimem/error.hpp"
#include "epimem/text.hpp"
#include "json_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace epimem {

const EventRegistry& EventRegistry::defaults() {
    static const EventRegistry registry(
        {"gain_item", "visit", "unlock", "collect", "craft", "use_item", "observe"});
    return registry;
}

ValidationResult validate_trajectory(const Trajectory& t, const EventRegistry& registry) {
    ValidationResult result;
    if (t.steps.empty()) {
        result.violations.emplace_back("steps nonempty");
        return result;
    }
    for (std::size_t pos = 0; pos < t.steps.size(); ++pos) {
        const Step& s = t.steps[pos];
        if (s.index != pos) {
            std::ostringstream os;
            if (s.index > pos) {
                os << "gap at index " << pos;
            } else {
                os << "out-of-order index " << s.index << " at position " << pos;
            }
            result.violations.push_back(os.str());
        }
        for (const auto& [item, count] : s.inventory) {
            if (count < 0) {
                result.violations.push_back("negative inventory count for " + item + " at step " +
                                            std::to_string(s.index));
            }
        }
        for (const auto& e : s.events) {
            if (!registry.contains(e.kind)) {
                result.violations.push_back("unknown event kind " + e.kind + " at step " +
                                            std::to_string(s.index));
            }
        }
    }
    return result;
}

ValidationResult validate_dataset(std::span<const Trajectory> trajectories, const EventRegistry& registry) {
    ValidationResult result;
    std::set<std::string> seen;
    for (const auto& t : trajectories) {
        if (!seen.insert(t.episode_id).second) {
            result.violations.push_back("duplicate episode id " + t.episode_id);
        }
        for (const auto& v : validate_trajectory(t, registry).violations) {
            result.violations.push_back(t.episode_id + ": " + v);
        }
    }
    return result;
}

Trajectory convert_archive_to_pseudo_trajectory(std::span<const ArchiveItem> items, std::string episode_id) {
    if (items.empty()) throw Error("empty archive");
    std::vector<const ArchiveItem*> order;
    order.reserve(items.size());
    for (const auto& item : items) order.push_back(&item);
    std::stable_sort(order.begin(), order.end(), [](const ArchiveItem* a, const ArchiveItem* b) {
        if (a->timestamp != b->timestamp) return a->timestamp < b->timestamp;
        return a->item_id < b->item_id;
    });
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (order[i]->timestamp == order[i - 1]->timestamp && order[i]->item_id == order[i - 1]->item_id) {
            throw Error("non-orderable archive");
        }
    }
    Trajectory t;
    t.episode_id = std::move(episode_id);
    t.env_kind = "archive";
    t.steps.reserve(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        Step s;
        s.index = i;
        s.action = "observe";
        s.observation = order[i]->body;
        s.location = order[i]->kind;
        s.events.insert(EventFact{"observe", order[i]->item_id, ""});
        t.steps.push_back(std::move(s));
    }
    return t;
}

std::string render_event(const EventFact& e) {
    std::string out = e.kind + "(" + e.object;
    if (!e.location.empty()) out += "@" + e.location;
    out += ")";
    return out;
}

std::string serialize_step_plain(const Step& s) {
    std::ostringstream os;
    os << "step=" << s.index << " action=" << s.action << " loc=" << s.location << " objs=";
    os << join(std::vector<std::string>(s.visible_objects.begin(), s.visible_objects.end()), ",");
    os << " inv=";
    bool first = true;
    for (const auto& [item, count] : s.inventory) {
        if (!first) os << ",";
        os << item << ":" << count;
        first = false;
    }
    os << " events=";
    first = true;
    for (const auto& e : s.events) {
        if (!first) os << ",";
        os << render_event(e);
        first = false;
    }
    os << " state=";
    os << join(std::vector<std::string>(s.state_facts.begin(), s.state_facts.end()), ",");
    os << " obs=" << s.observation;
    return os.str();
}

namespace {

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!trim(line).empty()) lines.push_back(line);
    }
    return lines;
}

void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    for (const auto& l : lines) out << l << '\n';
}

}  // namespace

std::string trajectory_to_json_line(const Trajectory& t) { return detail::to_json(t).dump(); }

Trajectory trajectory_from_json_line(std::string_view line) {
    try {
        return detail::trajectory_from_json(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& ex) {
        throw Error(std::string("malformed trajectory record: ") + ex.what());
    }
}

std::vector<Trajectory> read_trajectories(const std::filesystem::path& path) {
    std::vector<Trajectory> out;
    for (const auto& line : read_lines(path)) out.push_back(trajectory_from_json_line(line));
    return out;
}

void write_trajectories(const std::filesystem::path& path, std::span<const Trajectory> trajectories) {
    std::vector<std::string> lines;
    for (const auto& t : trajectories) lines.push_back(trajectory_to_json_line(t));
    write_lines(path, lines);
}

std::vector<ArchiveItem> read_archive(const std::filesystem::path& path) {
    std::vector<ArchiveItem> out;
    for (const auto& line : read_lines(path)) {
        try {
            out.push_back(detail::archive_item_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& ex) {
            throw Error(std::string("malformed archive record: ") + ex.what());
        }
    }
    return out;
}

void write_archive(const std::filesystem::path& path, std::span<const ArchiveItem> items) {
    std::vector<std::string> lines;
    for (const auto& item : items) lines.push_back(detail::to_json(item).dump());
    write_lines(path, lines);
}

}  // namespace epimem
