#include "json_io.hpp"

#include "epimem/error.hpp"

namespace epimem::detail {

using nlohmann::json;

json to_json(const EventFact& e) { return json{{"kind", e.kind}, {"object", e.object}, {"location", e.location}}; }

json to_json(const Step& s) {
    json events = json::array();
    for (const auto& e : s.events) events.push_back(to_json(e));
    return json{{"index", s.index},
                {"action", s.action},
                {"observation", s.observation},
                {"location", s.location},
                {"visible_objects", s.visible_objects},
                {"inventory", s.inventory},
                {"events", events},
                {"state_facts", s.state_facts}};
}

json to_json(const Trajectory& t) {
    json steps = json::array();
    for (const auto& s : t.steps) steps.push_back(to_json(s));
    return json{{"episode_id", t.episode_id}, {"env_kind", t.env_kind}, {"steps", steps}, {"seed", t.seed}};
}

json to_json(const ArchiveItem& a) {
    return json{{"item_id", a.item_id}, {"timestamp", a.timestamp}, {"kind", a.kind}, {"body", a.body}};
}

json to_json(const MemoryUnit& u) {
    json events = json::array();
    for (const auto& e : u.events) events.push_back(to_json(e));
    json relations = json::array();
    for (const auto& r : u.relations) relations.push_back(json::array({r.subject, r.predicate, r.object}));
    return json{{"step", u.step},
                {"action", u.action},
                {"objects", u.objects},
                {"events", events},
                {"relations", relations},
                {"state",
                 {{"inventory", u.state.inventory},
                  {"facts", u.state.facts},
                  {"changed_facts", u.state.changed_facts}}},
                {"location", u.location},
                {"summary", u.summary},
                {"write_mode", std::string(to_string(u.mode))}};
}

json to_json(const QAItem& q) {
    return json{{"qid", q.qid},
                {"episode_id", q.episode_id},
                {"question", q.question},
                {"gold_answer", q.gold_answer},
                {"family", q.family},
                {"gold_evidence_steps", q.gold_evidence_steps},
                {"answerable", q.answerable}};
}

EventFact event_from_json(const json& j) {
    EventFact e;
    e.kind = j.at("kind").get<std::string>();
    e.object = j.at("object").get<std::string>();
    e.location = j.value("location", std::string{});
    return e;
}

Step step_from_json(const json& j) {
    Step s;
    s.index = j.at("index").get<std::size_t>();
    s.action = j.at("action").get<std::string>();
    s.observation = j.value("observation", std::string{});
    s.location = j.value("location", std::string{});
    if (j.contains("visible_objects")) s.visible_objects = j.at("visible_objects").get<std::set<std::string>>();
    if (j.contains("inventory")) s.inventory = j.at("inventory").get<std::map<std::string, std::int64_t>>();
    if (j.contains("events")) {
        for (const auto& e : j.at("events")) s.events.insert(event_from_json(e));
    }
    if (j.contains("state_facts")) s.state_facts = j.at("state_facts").get<std::set<std::string>>();
    return s;
}

Trajectory trajectory_from_json(const json& j) {
    Trajectory t;
    t.episode_id = j.at("episode_id").get<std::string>();
    t.env_kind = j.at("env_kind").get<std::string>();
    t.seed = j.value("seed", std::uint64_t{0});
    for (const auto& s : j.at("steps")) t.steps.push_back(step_from_json(s));
    return t;
}

ArchiveItem archive_item_from_json(const json& j) {
    ArchiveItem a;
    a.item_id = j.at("item_id").get<std::string>();
    a.timestamp = j.at("timestamp").get<std::int64_t>();
    a.kind = j.value("kind", std::string{"other"});
    a.body = j.value("body", std::string{});
    return a;
}

QAItem qa_from_json(const json& j) {
    QAItem q;
    q.qid = j.at("qid").get<std::string>();
    q.episode_id = j.at("episode_id").get<std::string>();
    q.question = j.at("question").get<std::string>();
    q.gold_answer = j.at("gold_answer").get<std::string>();
    q.family = j.at("family").get<std::string>();
    q.gold_evidence_steps = j.at("gold_evidence_steps").get<std::vector<std::size_t>>();
    q.answerable = j.at("answerable").get<bool>();
    return q;
}

}  // namespace epimem::detail
