#pragma once

#include "epimem/packer.hpp"
#include "epimem/traj_model.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace epimem {

// Final step only: "step=<i> obs=<observation>".
EvidencePack no_memory_interface(const Trajectory& t);

struct Chunk {
    std::size_t first_step = 0;
    std::size_t last_step = 0;  // inclusive
    std::vector<std::string> lines;  // serialize_step_plain per step
    std::string text;                // lines joined by spaces
};

struct ChunkIndex {
    std::vector<Chunk> chunks;
    std::size_t chunk_size = 3;
    std::size_t stride = 3;
    std::vector<std::vector<std::string>> tokens;  // word_tokens per chunk
};

ChunkIndex build_chunk_index(const Trajectory& t, std::size_t chunk_size = 3, std::size_t stride = 3);

// Chunk indices of the top_k chunks by token F1, ties to the earlier chunk.
std::vector<std::size_t> rank_chunks(const ChunkIndex& idx, std::string_view question, std::size_t top_k);

// Every line of the selected chunks, no budget.
EvidencePack vanilla_rag_retrieve(const ChunkIndex& idx, std::string_view question, std::size_t top_k);

enum class NodeKind { step, entity, location };

struct GraphNode {
    NodeKind kind = NodeKind::entity;
    std::string label;

    auto operator<=>(const GraphNode&) const = default;
};

struct GraphEdge {
    std::size_t src = 0;
    std::string predicate;  // at | has | did | mention | next
    std::size_t dst = 0;

    auto operator<=>(const GraphEdge&) const = default;
};

class TrajGraph {
public:
    std::size_t add_node(NodeKind kind, const std::string& label);
    void add_edge(std::size_t src, std::string predicate, std::size_t dst);

    const std::vector<GraphNode>& nodes() const { return nodes_; }
    const std::set<GraphEdge>& edges() const { return edges_; }
    const std::vector<std::size_t>& neighbours(std::size_t node) const { return adjacency_[node]; }
    std::optional<std::size_t> find(NodeKind kind, const std::string& label) const;

    // Step node id -> trajectory step text.
    std::vector<std::string> step_lines;
    std::vector<std::size_t> step_of_node;  // meaningful for step nodes

private:
    std::vector<GraphNode> nodes_;
    std::set<GraphEdge> edges_;
    std::vector<std::vector<std::size_t>> adjacency_;  // undirected
    std::map<GraphNode, std::size_t> index_;
};

TrajGraph graph_build(const Trajectory& t);

// Entity and location nodes whose label tokens all occur in the question.
std::vector<std::size_t> graph_seeds(const TrajGraph& g, std::string_view question);

// Steps within `hops` undirected hops of a seed.
std::vector<std::size_t> graph_steps(const TrajGraph& g, std::string_view question, std::size_t hops = 2);

EvidencePack graph_retrieve(const TrajGraph& g, std::string_view question, std::size_t hops = 2);

EvidencePack full_history_interface(const Trajectory& t);

// "step=<i> action=<a>" per step.
EvidencePack summarize_then_answer_interface(const Trajectory& t);

// Text-only compression: dedupe, keyword-overlap ranking, a whole-line
// budget cut, and grouping of repeated consecutive lines.
EvidencePack rtk_compress(const EvidencePack& raw, std::string_view question, std::size_t budget);

struct Note {
    std::size_t step = 0;
    std::string text;
    std::set<std::string> keywords;
};

struct NoteStore {
    std::vector<Note> notes;
    std::vector<std::pair<std::size_t, std::size_t>> links;  // note index pairs, first < second
    std::vector<std::vector<std::size_t>> linked;             // adjacency
};

struct Segment {
    std::size_t first_step = 0;
    std::size_t last_step = 0;
    std::string summary;
};

struct HierStore {
    std::size_t segment_size = 8;
    std::vector<Segment> segments;
    std::vector<std::string> step_lines;
};

struct LightStore {
    std::size_t segment_size = 10;
    std::vector<PackLine> lines;  // per-step summaries and topic lines
};

NoteStore build_note_store(const Trajectory& t);
HierStore build_hier_store(const Trajectory& t, std::size_t segment_size = 8);
LightStore build_light_store(const Trajectory& t, std::size_t segment_size = 10);

std::vector<std::size_t> note_selection(const NoteStore& s, std::string_view question, std::size_t top_k);
std::vector<std::size_t> hier_selection(const HierStore& s, std::string_view question);
std::vector<std::size_t> light_selection(const LightStore& s, std::string_view question, std::size_t top_k);

EvidencePack neighbor_retrieve(const NoteStore& s, std::string_view question, std::size_t top_k, std::size_t budget);
EvidencePack neighbor_retrieve(const HierStore& s, std::string_view question, std::size_t top_k, std::size_t budget);
EvidencePack neighbor_retrieve(const LightStore& s, std::string_view question, std::size_t top_k, std::size_t budget);

// Adds lines in the given order while they fit the budget.
EvidencePack fill_budget(const std::vector<PackLine>& ordered, std::size_t budget);

}  // namespace epimem
