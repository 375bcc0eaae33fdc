#include "epimem/baselines.hpp"

#include "epimem/error.hpp"
#include "epimem/text.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

namespace epimem {

namespace {

std::string events_text(const Step& s) {
    std::vector<std::string> parts;
    for (const auto& e : s.events) parts.push_back(render_event(e));
    return join(parts, ",");
}

// Indices of the top_k scores, highest first, ties to the lower index.
std::vector<std::size_t> top_by_score(const std::vector<double>& scores, std::size_t top_k) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    if (order.size() > top_k) order.resize(top_k);
    return order;
}

std::vector<std::string> keywords_of(std::string_view question) {
    std::vector<std::string> out;
    for (auto& w : word_tokens(question)) {
        if (!is_stopword(w) && std::find(out.begin(), out.end(), w) == out.end()) out.push_back(std::move(w));
    }
    return out;
}

}  // namespace

EvidencePack fill_budget(const std::vector<PackLine>& ordered, std::size_t budget) {
    std::vector<PackLine> kept;
    std::size_t used = 0;
    for (const auto& l : ordered) {
        const std::size_t c = token_count(l.text);
        if (used + c > budget) continue;
        used += c;
        kept.push_back(l);
    }
    return make_pack(std::move(kept), budget);
}

EvidencePack no_memory_interface(const Trajectory& t) {
    if (t.steps.empty()) return make_pack({});
    const Step& s = t.steps.back();
    return make_pack({PackLine{s.index, "step=" + std::to_string(s.index) + " obs=" + s.observation}});
}

ChunkIndex build_chunk_index(const Trajectory& t, std::size_t chunk_size, std::size_t stride) {
    if (chunk_size == 0 || stride == 0) throw Error("chunk_size and stride must be >= 1");
    if (stride > chunk_size) throw Error("stride larger than chunk_size leaves steps uncovered");
    ChunkIndex idx;
    idx.chunk_size = chunk_size;
    idx.stride = stride;
    for (std::size_t start = 0; start < t.steps.size(); start += stride) {
        Chunk c;
        c.first_step = t.steps[start].index;
        const std::size_t end = std::min(start + chunk_size, t.steps.size());
        for (std::size_t i = start; i < end; ++i) c.lines.push_back(serialize_step_plain(t.steps[i]));
        c.last_step = t.steps[end - 1].index;
        c.text = join(c.lines, " ");
        idx.tokens.push_back(word_tokens(c.text));
        idx.chunks.push_back(std::move(c));
        if (end == t.steps.size()) break;
    }
    return idx;
}

std::vector<std::size_t> rank_chunks(const ChunkIndex& idx, std::string_view question, std::size_t top_k) {
    const auto q = word_tokens(question);
    std::vector<double> scores;
    scores.reserve(idx.chunks.size());
    for (const auto& toks : idx.tokens) scores.push_back(token_f1(q, toks));
    return top_by_score(scores, top_k);
}

EvidencePack vanilla_rag_retrieve(const ChunkIndex& idx, std::string_view question, std::size_t top_k) {
    std::vector<PackLine> lines;
    std::set<std::size_t> seen;
    for (auto ci : rank_chunks(idx, question, top_k)) {
        const Chunk& c = idx.chunks[ci];
        for (std::size_t i = 0; i < c.lines.size(); ++i) {
            const std::size_t step = c.first_step + i;
            if (seen.insert(step).second) lines.push_back(PackLine{step, c.lines[i]});
        }
    }
    return make_pack(std::move(lines));
}

std::size_t TrajGraph::add_node(NodeKind kind, const std::string& label) {
    GraphNode n{kind, label};
    if (auto it = index_.find(n); it != index_.end()) return it->second;
    const std::size_t id = nodes_.size();
    nodes_.push_back(n);
    adjacency_.emplace_back();
    step_of_node.push_back(0);
    step_lines.emplace_back();
    index_.emplace(std::move(n), id);
    return id;
}

void TrajGraph::add_edge(std::size_t src, std::string predicate, std::size_t dst) {
    if (!edges_.insert(GraphEdge{src, std::move(predicate), dst}).second) return;
    auto link = [&](std::size_t a, std::size_t b) {
        auto& adj = adjacency_[a];
        if (std::find(adj.begin(), adj.end(), b) == adj.end()) adj.push_back(b);
    };
    link(src, dst);
    link(dst, src);
}

std::optional<std::size_t> TrajGraph::find(NodeKind kind, const std::string& label) const {
    auto it = index_.find(GraphNode{kind, label});
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

TrajGraph graph_build(const Trajectory& t) {
    TrajGraph g;
    std::optional<std::size_t> previous;
    for (const auto& s : t.steps) {
        const std::size_t node = g.add_node(NodeKind::step, "step_" + std::to_string(s.index));
        g.step_of_node[node] = s.index;
        g.step_lines[node] = serialize_step_plain(s);
        if (!s.location.empty()) g.add_edge(node, "at", g.add_node(NodeKind::location, s.location));
        g.add_edge(node, "did", g.add_node(NodeKind::entity, s.action));
        for (const auto& [item, n] : s.inventory) {
            if (n > 0) g.add_edge(node, "has", g.add_node(NodeKind::entity, item));
        }
        for (const auto& o : s.visible_objects) g.add_edge(node, "mention", g.add_node(NodeKind::entity, o));
        for (const auto& e : s.events) g.add_edge(node, "mention", g.add_node(NodeKind::entity, e.object));
        if (previous) g.add_edge(*previous, "next", node);
        previous = node;
    }
    return g;
}

std::vector<std::size_t> graph_seeds(const TrajGraph& g, std::string_view question) {
    const auto q = word_tokens(question);
    const std::set<std::string> qset(q.begin(), q.end());
    std::vector<std::size_t> seeds;
    for (std::size_t i = 0; i < g.nodes().size(); ++i) {
        const auto& n = g.nodes()[i];
        if (n.kind == NodeKind::step) continue;
        const auto toks = word_tokens(n.label);
        if (toks.empty()) continue;
        if (std::all_of(toks.begin(), toks.end(), [&](const std::string& w) { return qset.contains(w); })) {
            seeds.push_back(i);
        }
    }
    return seeds;
}

std::vector<std::size_t> graph_steps(const TrajGraph& g, std::string_view question, std::size_t hops) {
    std::vector<std::size_t> depth(g.nodes().size(), SIZE_MAX);
    std::deque<std::size_t> queue;
    for (auto s : graph_seeds(g, question)) {
        depth[s] = 0;
        queue.push_back(s);
    }
    while (!queue.empty()) {
        const auto n = queue.front();
        queue.pop_front();
        if (depth[n] == hops) continue;
        for (auto m : g.neighbours(n)) {
            if (depth[m] != SIZE_MAX) continue;
            depth[m] = depth[n] + 1;
            queue.push_back(m);
        }
    }
    std::vector<std::size_t> steps;
    for (std::size_t i = 0; i < g.nodes().size(); ++i) {
        if (depth[i] != SIZE_MAX && g.nodes()[i].kind == NodeKind::step) steps.push_back(g.step_of_node[i]);
    }
    std::sort(steps.begin(), steps.end());
    return steps;
}

EvidencePack graph_retrieve(const TrajGraph& g, std::string_view question, std::size_t hops) {
    std::vector<PackLine> lines;
    for (auto step : graph_steps(g, question, hops)) {
        auto node = g.find(NodeKind::step, "step_" + std::to_string(step));
        lines.push_back(PackLine{step, g.step_lines[*node]});
    }
    return make_pack(std::move(lines));
}

EvidencePack full_history_interface(const Trajectory& t) {
    std::vector<PackLine> lines;
    lines.reserve(t.steps.size());
    for (const auto& s : t.steps) lines.push_back(PackLine{s.index, serialize_step_plain(s)});
    return make_pack(std::move(lines));
}

EvidencePack summarize_then_answer_interface(const Trajectory& t) {
    std::vector<PackLine> lines;
    lines.reserve(t.steps.size());
    for (const auto& s : t.steps) {
        lines.push_back(PackLine{s.index, "step=" + std::to_string(s.index) + " action=" + s.action});
    }
    return make_pack(std::move(lines));
}

EvidencePack rtk_compress(const EvidencePack& raw, std::string_view question, std::size_t budget) {
    if (raw.lines.empty()) throw Error("rtk_compress needs a nonempty interface");
    const auto keywords = keywords_of(question);

    // Dedupe identical lines, keeping the first.
    std::vector<PackLine> unique;
    std::set<std::string> seen;
    for (const auto& l : raw.lines) {
        if (seen.insert(l.text).second) unique.push_back(l);
    }
    std::vector<double> overlap;
    for (const auto& l : unique) {
        const auto toks = word_tokens(l.text);
        std::size_t n = 0;
        for (const auto& k : keywords) {
            if (std::find(toks.begin(), toks.end(), k) != toks.end()) ++n;
        }
        overlap.push_back(static_cast<double>(n));
    }
    std::vector<PackLine> ranked;
    for (auto i : top_by_score(overlap, unique.size())) ranked.push_back(unique[i]);
    EvidencePack cut = fill_budget(ranked, budget);

    // Group runs of consecutive lines that repeat the same body.
    auto body = [](const std::string& text) {
        const auto sp = text.find(' ');
        return sp == std::string::npos ? std::string() : text.substr(sp + 1);
    };
    std::vector<PackLine> grouped;
    std::size_t run = 0;
    std::size_t last_step = 0;
    std::string head;
    auto flush = [&] {
        if (run > 1) grouped.back().text += " (x" + std::to_string(run) + ")";
    };
    for (const auto& l : cut.lines) {
        const std::string b = body(l.text);
        if (run > 0 && !b.empty() && b == head && l.step == last_step + 1) {
            ++run;
            last_step = l.step;
            continue;
        }
        flush();
        grouped.push_back(l);
        head = b;
        run = 1;
        last_step = l.step;
    }
    flush();
    return make_pack(std::move(grouped), budget);
}

NoteStore build_note_store(const Trajectory& t) {
    NoteStore store;
    for (const auto& s : t.steps) {
        Note n;
        n.step = s.index;
        n.text = "step=" + std::to_string(s.index) + " action=" + s.action + " loc=" + s.location +
                 " objs=" + join(std::vector<std::string>(s.visible_objects.begin(), s.visible_objects.end()), ",") +
                 " events=" + events_text(s);
        if (!s.location.empty()) n.keywords.insert(s.location);
        n.keywords.insert(s.action);
        n.keywords.insert(s.visible_objects.begin(), s.visible_objects.end());
        for (const auto& e : s.events) n.keywords.insert(e.object);
        store.notes.push_back(std::move(n));
    }
    store.linked.resize(store.notes.size());
    for (std::size_t a = 0; a < store.notes.size(); ++a) {
        for (std::size_t b = a + 1; b < store.notes.size(); ++b) {
            std::size_t shared = 0;
            for (const auto& k : store.notes[a].keywords) {
                if (store.notes[b].keywords.contains(k) && ++shared >= 2) break;
            }
            if (shared >= 2) {
                store.links.emplace_back(a, b);
                store.linked[a].push_back(b);
                store.linked[b].push_back(a);
            }
        }
    }
    return store;
}

HierStore build_hier_store(const Trajectory& t, std::size_t segment_size) {
    if (segment_size == 0) throw Error("segment_size must be >= 1");
    HierStore store;
    store.segment_size = segment_size;
    for (const auto& s : t.steps) store.step_lines.push_back(serialize_step_plain(s));
    for (std::size_t start = 0; start < t.steps.size(); start += segment_size) {
        const std::size_t end = std::min(start + segment_size, t.steps.size());
        std::set<std::string> actions, places, events;
        for (std::size_t i = start; i < end; ++i) {
            actions.insert(t.steps[i].action);
            if (!t.steps[i].location.empty()) places.insert(t.steps[i].location);
            for (const auto& e : t.steps[i].events) events.insert(render_event(e));
        }
        Segment seg;
        seg.first_step = t.steps[start].index;
        seg.last_step = t.steps[end - 1].index;
        seg.summary = "steps " + std::to_string(seg.first_step) + "-" + std::to_string(seg.last_step) +
                      ": " + join(std::vector<std::string>(actions.begin(), actions.end()), ",") + " at " +
                      join(std::vector<std::string>(places.begin(), places.end()), ",") + "; events " +
                      join(std::vector<std::string>(events.begin(), events.end()), ",");
        store.segments.push_back(std::move(seg));
    }
    return store;
}

LightStore build_light_store(const Trajectory& t, std::size_t segment_size) {
    if (segment_size == 0) throw Error("segment_size must be >= 1");
    LightStore store;
    store.segment_size = segment_size;
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        const Step& s = t.steps[i];
        if (i % segment_size == 0) {
            std::set<std::string> topics;
            for (std::size_t j = i; j < std::min(i + segment_size, t.steps.size()); ++j) {
                for (const auto& e : t.steps[j].events) topics.insert(e.object);
            }
            store.lines.push_back(PackLine{s.index, "step=" + std::to_string(s.index) + " topic=" +
                                                        join(std::vector<std::string>(topics.begin(), topics.end()), ",")});
        }
        store.lines.push_back(PackLine{s.index, "step=" + std::to_string(s.index) + " action=" + s.action +
                                                    " events=" + events_text(s)});
    }
    return store;
}

std::vector<std::size_t> note_selection(const NoteStore& s, std::string_view question, std::size_t top_k) {
    const auto q = word_tokens(question);
    std::vector<double> scores;
    for (const auto& n : s.notes) scores.push_back(token_f1(q, word_tokens(n.text)));
    const auto top = top_by_score(scores, top_k);
    std::vector<std::size_t> out = top;
    std::set<std::size_t> chosen(top.begin(), top.end());
    for (auto i : top) {
        for (auto j : s.linked[i]) {
            if (chosen.insert(j).second) out.push_back(j);
        }
    }
    return out;
}

std::vector<std::size_t> hier_selection(const HierStore& s, std::string_view question) {
    const auto q = word_tokens(question);
    std::vector<double> seg_scores;
    for (const auto& seg : s.segments) seg_scores.push_back(token_f1(q, word_tokens(seg.summary)));
    std::vector<std::size_t> members;
    for (auto si : top_by_score(seg_scores, 2)) {
        for (std::size_t st = s.segments[si].first_step; st <= s.segments[si].last_step; ++st) members.push_back(st);
    }
    std::vector<double> step_scores;
    for (auto st : members) step_scores.push_back(token_f1(q, word_tokens(s.step_lines[st])));
    std::vector<std::size_t> out;
    for (auto i : top_by_score(step_scores, members.size())) out.push_back(members[i]);
    return out;
}

std::vector<std::size_t> light_selection(const LightStore& s, std::string_view question, std::size_t top_k) {
    const auto q = word_tokens(question);
    std::vector<double> scores;
    for (const auto& l : s.lines) scores.push_back(token_f1(q, word_tokens(l.text)));
    return top_by_score(scores, top_k);
}

EvidencePack neighbor_retrieve(const NoteStore& s, std::string_view question, std::size_t top_k, std::size_t budget) {
    std::vector<PackLine> ordered;
    for (auto i : note_selection(s, question, top_k)) ordered.push_back(PackLine{s.notes[i].step, s.notes[i].text});
    return fill_budget(ordered, budget);
}

EvidencePack neighbor_retrieve(const HierStore& s, std::string_view question, std::size_t top_k, std::size_t budget) {
    std::vector<PackLine> ordered;
    for (auto st : hier_selection(s, question)) {
        if (ordered.size() == top_k) break;
        ordered.push_back(PackLine{st, s.step_lines[st]});
    }
    return fill_budget(ordered, budget);
}

EvidencePack neighbor_retrieve(const LightStore& s, std::string_view question, std::size_t top_k, std::size_t budget) {
    std::vector<PackLine> ordered;
    for (auto i : light_selection(s, question, top_k)) ordered.push_back(s.lines[i]);
    return fill_budget(ordered, budget);
}

}  // namespace epimem
