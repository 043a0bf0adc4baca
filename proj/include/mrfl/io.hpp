#pragma once

#include "mrfl/citest.hpp"
#include "mrfl/graph.hpp"
#include "mrfl/model.hpp"
#include "mrfl/samples.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace mrfl::io {

/// {"p": p, "edges": [[i, j], ...]} with i < j, sorted.
nlohmann::json graph_to_json(const Graph& g);
Graph graph_from_json(const nlohmann::json& j);

/// {"p": p, "edges": [[i, j, J], ...], "h": [...]}.
nlohmann::json model_to_json(const IsingModel& m);
IsingModel model_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

/// One configuration per row, no header. Spin sets print -1/+1, others print
/// alphabet indices. An optional first line "# p=.. n=.. seed=.." is written
/// when `seed` is given.
void write_samples_csv(std::ostream& os, const SampleSet& s, std::optional<std::uint64_t> seed = {});

/// Reads rows of integers. If every entry is -1 or 1 the set is read as
/// spins; otherwise entries are alphabet indices and the alphabet is
/// max + 1 (or `alphabet` when given). Lines starting with '#' are skipped.
SampleSet read_samples_csv(std::istream& is, std::optional<int> alphabet = {});

/// Header "i,j,score,S,T"; S and T are semicolon-joined node ids.
void write_scores_csv(std::ostream& os, const ScoreMatrix& m);
/// p defaults to the largest node id + 1.
ScoreMatrix read_scores_csv(std::istream& is, std::optional<int> p = {});

}  // namespace mrfl::io
