// Copyright (C) 2026 The genescan authors. All rights reserved.

// Licensed under the Apache License, Version 2.0 (the "License");
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include "genescan/cli.hpp"
#include "genescan/error.hpp"
#include "genescan/ingest.hpp"
#include "genescan/matcher.hpp"
#include "genescan/oracle.hpp"

#include "support/enum_oracle.hpp"
#include "support/generators.hpp"
#include "support/testutil.hpp"

using namespace genescan;
using namespace genescan::test;

namespace {

BlockPattern pattern_of(std::vector<std::string> ops, std::uint32_t rmin = 1,
                        std::uint32_t rmax = 1,
                        std::set<std::string> ignored = {}) {
    BlockPattern p;
    p.id = 0;
    for (const std::string& text : ops) {
        p.ops.push_back(parse_op_pattern(text, "test"));
    }
    p.repeats_min = rmin;
    p.repeats_max = rmax;
    p.ignored_ops = std::move(ignored);
    return p;
}

Block block_of(std::vector<std::string> ops) {
    Block b;
    b.op_types = std::move(ops);
    for (std::size_t i = 0; i < b.op_types.size(); ++i) {
        b.node_ids.push_back(static_cast<NodeId>(i));
    }
    return b;
}

ComponentSignature chain_component(std::vector<std::vector<std::string>> blocks,
                                   std::vector<std::tuple<std::uint32_t, std::uint32_t,
                                                          std::uint32_t>> edges,
                                   std::uint32_t min_repeats = 1) {
    ComponentSignature comp;
    for (std::uint32_t i = 0; i < blocks.size(); ++i) {
        BlockPattern p = pattern_of(blocks[i]);
        p.id = i;
        comp.blocks.push_back(std::move(p));
    }
    for (auto [src, dst, min] : edges) {
        comp.edges.push_back(EdgePattern{src, dst, min});
    }
    comp.min_repeats = min_repeats;
    validate_component(comp, "test");
    return comp;
}

const std::vector<FamilySignature>& shipped_db() {
    static const std::vector<FamilySignature> db =
        load_signature_db(source_path("signatures"));
    return db;
}

const ComponentSignature& deberta_component() {
    static const ComponentSignature comp = [] {
        for (const FamilySignature& f : shipped_db()) {
            if (f.name == "DebertaModel") return f.components[0];
        }
        throw std::runtime_error("DebertaModel not shipped");
    }();
    return comp;
}

}  // namespace

TEST_CASE("depth-wise repeats match whole copies only") {
    BlockPattern p = pattern_of({"Mul", "Add"}, 1, 2);
    CHECK(match_block_pattern(p, block_of({"Mul", "Add"})));
    CHECK(match_block_pattern(p, block_of({"Mul", "Add", "Mul", "Add"})));
    CHECK_FALSE(match_block_pattern(p, block_of({"Mul", "Add", "Mul"})));
    CHECK_FALSE(match_block_pattern(p, block_of({"Mul"})));
    CHECK_FALSE(match_block_pattern(p, block_of({"Mul", "Add", "Mul", "Add", "Mul", "Add"})));
}

TEST_CASE("the any-many wildcard spans zero or more ops") {
    BlockPattern p = pattern_of({"GatherElements", "*"});
    CHECK(match_block_pattern(p, block_of({"GatherElements"})));
    CHECK(match_block_pattern(p, block_of({"GatherElements", "Transpose", "Softmax"})));
    CHECK_FALSE(match_block_pattern(p, block_of({"Transpose", "GatherElements"})));
}

TEST_CASE("alternation matches exactly one of its options") {
    BlockPattern p = pattern_of({"GatherElements", "Add||Transpose"});
    CHECK(match_block_pattern(p, block_of({"GatherElements", "Add"})));
    CHECK(match_block_pattern(p, block_of({"GatherElements", "Transpose"})));
    CHECK_FALSE(match_block_pattern(p, block_of({"GatherElements", "Mul"})));
}

TEST_CASE("ignored ops vanish before matching") {
    BlockPattern p = pattern_of({"Mul", "Add"}, 1, 1, {"Cast"});
    CHECK(match_block_pattern(p, block_of({"Mul", "Cast", "Add"})));
    CHECK(match_block_pattern(p, block_of({"Cast", "Mul", "Add", "Cast"})));
    CHECK_FALSE(match_block_pattern(p, block_of({"Cast"})));
}

TEST_CASE("the single wildcard needs exactly one op") {
    BlockPattern p = pattern_of({"?"});
    CHECK(match_block_pattern(p, block_of({"Anything"})));
    CHECK_FALSE(match_block_pattern(p, block_of({"Two", "Ops"})));
}

TEST_CASE("pattern matching agrees with exhaustive expansion") {
    Rng rng(31337);
    const std::vector<std::string> alphabet{"Conv", "Relu", "Add"};
    auto rand_op = [&] { return alphabet[pick(rng, 0, 2)]; };

    for (int round = 0; round < 400; ++round) {
        BlockPattern p;
        p.id = 0;
        const std::uint32_t len = pick(rng, 1, 4);
        bool used_many = false;
        for (std::uint32_t i = 0; i < len; ++i) {
            switch (pick(rng, 0, 5)) {
                case 0: p.ops.push_back(parse_op_pattern("?", "t")); break;
                case 1:
                    if (!used_many) {
                        used_many = true;
                        p.ops.push_back(parse_op_pattern("*", "t"));
                        break;
                    }
                    [[fallthrough]];
                case 2:
                    p.ops.push_back(parse_op_pattern(rand_op() + "||" + rand_op(), "t"));
                    break;
                default: p.ops.push_back(parse_op_pattern(rand_op(), "t")); break;
            }
        }
        p.repeats_min = pick(rng, 1, 2);
        p.repeats_max = p.repeats_min + pick(rng, 0, 1);

        std::vector<std::string> seq;
        for (std::uint32_t i = pick(rng, 0, 8); i > 0; --i) seq.push_back(rand_op());

        Block b = block_of(seq);
        CAPTURE(round);
        CHECK(match_block_pattern(p, b) == enumerated_match(p, seq, alphabet));
    }
}

TEST_CASE("check_all_blocks is a necessary-condition prefilter") {
    BlockGraph no_cos = make_block_graph(
        {{"Mul", "Equal"}, {"Where"}, {"Expand"}, {"GatherElements", "Add"}});
    CHECK_FALSE(check_all_blocks(deberta_component(), no_cos));

    // All patterns present somewhere, nothing connected: prefilter passes.
    BlockGraph scattered = make_block_graph({{"ConstantOfShape"},
                                             {"Mul", "Equal"},
                                             {"Where"},
                                             {"Expand"},
                                             {"GatherElements", "Transpose"}});
    CHECK(check_all_blocks(deberta_component(), scattered));
    CHECK_FALSE(check_signature(deberta_component(), scattered).matched);

    BlockGraph empty = make_block_graph({});
    CHECK_FALSE(check_all_blocks(deberta_component(), empty));
}

TEST_CASE("get_start_nodes returns every block matching the start pattern") {
    BlockGraph bg = make_block_graph({{"ConstantOfShape"},
                                      {"Mul"},
                                      {"ConstantOfShape"},
                                      {"ConstantOfShape"}});
    CHECK(get_start_nodes(deberta_component(), bg) ==
          std::vector<BlockId>{0, 2, 3});

    BlockGraph none = make_block_graph({{"Mul"}});
    CHECK(get_start_nodes(deberta_component(), none).empty());

    ComponentSignature any = chain_component({{"?"}}, {});
    CHECK(get_start_nodes(any, none) == std::vector<BlockId>{0});
}

TEST_CASE("traversal succeeds on the planted attention fixture") {
    AgnosticGraph g = load_model(load_file(source_path("fixtures/deberta.json")));
    BlockGraph bg = extract_blocks(g);
    std::vector<BlockId> starts = get_start_nodes(deberta_component(), bg);
    REQUIRE(starts.size() == 1);
    VisitedEdgeCounts visited;
    CHECK(traverse_from_start(deberta_component(), starts[0],
                              deberta_component().start_id, visited, bg));
    // Every signature edge was realized at least once.
    CHECK(visited.size() == 5);

    ComponentMatch match = check_signature(deberta_component(), bg);
    CHECK(match.matched);
    CHECK(match.occurrences == 1);
    CHECK(match.starts == starts);
}

TEST_CASE("width-wise minimum rejects single edges") {
    ComponentSignature comp = chain_component({{"A"}, {"B"}}, {{0, 1, 2}});
    BlockGraph one = make_block_graph({{"A"}, {"B"}}, {{0, 1, 1}});
    CHECK_FALSE(check_signature(comp, one).matched);

    BlockGraph two = make_block_graph({{"A"}, {"B"}, {"B"}}, {{0, 1, 1}, {0, 2, 1}});
    CHECK(check_signature(comp, two).matched);

    // Stored multiplicity weighs in.
    BlockGraph heavy = make_block_graph({{"A"}, {"B"}}, {{0, 1, 2}});
    CHECK(check_signature(comp, heavy).matched);
}

TEST_CASE("the diamond-shaped signature matches the figure fixture") {
    AgnosticGraph g = load_model(load_file(source_path("fixtures/figure1.json")));
    BlockGraph bg = extract_blocks(g);
    ComponentSignature diamond = chain_component(
        {{"Conv", "BatchNormalization", "Relu"},
         {"Conv", "Relu"},
         {"MaxPool", "Sigmoid"},
         {"Add", "Softmax"}},
        {{0, 1, 1}, {0, 2, 1}, {1, 3, 1}, {2, 3, 1}});
    CHECK(check_signature(diamond, bg).matched);
    CHECK(brute_force_match(diamond, bg));
}

TEST_CASE("component min_repeats counts distinct start occurrences") {
    ComponentSignature comp = chain_component({{"X"}, {"Y"}}, {{0, 1, 1}}, 2);
    BlockGraph twice = make_block_graph({{"X"}, {"Y"}, {"X"}, {"Y"}},
                                        {{0, 1, 1}, {2, 3, 1}});
    ComponentMatch m = check_signature(comp, twice);
    CHECK(m.matched);
    CHECK(m.occurrences == 2);

    BlockGraph once = make_block_graph({{"X"}, {"Y"}}, {{0, 1, 1}});
    CHECK_FALSE(check_signature(comp, once).matched);
    CHECK(check_signature(comp, once).occurrences == 1);

    BlockGraph zero = make_block_graph({{"Z"}});
    ComponentMatch none = check_signature(comp, zero);
    CHECK_FALSE(none.matched);
    CHECK(none.occurrences == 0);
}

TEST_CASE("scan reports multiple modalities and honors BestMatch") {
    AgnosticGraph ocr = load_model(load_file(source_path("fixtures/ocr.json")));
    ScanOptions opts;
    ScanReport all = scan(ocr, shipped_db(), opts);
    REQUIRE(all.detections.size() == 2);
    CHECK(all.detections[0].family == "ResNetFamily");
    CHECK(all.detections[1].family == "Sequencer2D");

    AgnosticGraph roberta = load_model(load_file(source_path("fixtures/roberta.json")));
    ScanReport multi = scan(roberta, shipped_db(), opts);
    REQUIRE(multi.detections.size() == 3);
    CHECK(multi.detections[0].family == "RobertaDerivative");

    opts.mode = ScanMode::BestMatch;
    ScanReport best = scan(roberta, shipped_db(), opts);
    REQUIRE(best.detections.size() == 1);
    CHECK(best.detections[0].family == "RobertaDerivative");
    // BestMatch is always the head of the AllMatches ranking.
    CHECK(best.detections[0].family == multi.detections[0].family);

    ScanReport empty = scan(roberta, {}, opts);
    CHECK(empty.detections.empty());
}

TEST_CASE("scan results are deterministic apart from the wall clock") {
    AgnosticGraph g = load_model(load_file(source_path("fixtures/vit.json")));
    ScanOptions opts;
    ScanReport a = scan(g, shipped_db(), opts);
    ScanReport b = scan(g, shipped_db(), opts);
    a.stats.ms = b.stats.ms = 0;
    CHECK(report_to_json(a) == report_to_json(b));
}

TEST_CASE("implementation agrees with the reference matcher") {
    Rng rng(50505);
    int done = 0;
    while (done < 150) {
        ComponentSignature comp = random_component(rng, 4);
        const std::uint32_t plants = pick(rng, 0, 2);
        BlockGraph bg = random_block_graph(rng, &comp, plants, 18);
        if (bg.blocks.size() > 20) continue;
        ++done;

        ComponentMatch mine = check_signature(comp, bg);
        CAPTURE(done);
        CHECK(mine.matched == brute_force_match(comp, bg));
        CHECK(mine.occurrences == brute_force_occurrences(comp, bg));
    }
}

TEST_CASE("the reference matcher refuses oversized graphs") {
    std::vector<std::vector<std::string>> blocks(21, {"A"});
    BlockGraph big = make_block_graph(std::move(blocks));
    ComponentSignature comp = chain_component({{"A"}}, {});
    CHECK_THROWS_AS(brute_force_match(comp, big), Error);
}

TEST_CASE("matching is monotone under graph growth") {
    Rng rng(60606);
    for (int round = 0; round < 60; ++round) {
        ComponentSignature comp = random_component(rng, 3);
        comp.min_repeats = 1;  // a single plant realizes the component once
        BlockGraph bg = random_block_graph(rng, &comp, 1, 14);
        REQUIRE(check_signature(comp, bg).matched);

        // Bolt on extra blocks and forward edges; the match must survive.
        std::vector<std::vector<std::string>> ops;
        std::vector<std::tuple<BlockId, BlockId, std::uint32_t>> edges;
        for (const Block& b : bg.blocks) ops.push_back(b.op_types);
        for (const BlockEdge& e : bg.edges) edges.push_back({e.src, e.dst, e.count});
        const BlockId base = static_cast<BlockId>(ops.size());
        ops.push_back({random_op(rng)});
        ops.push_back({random_op(rng), random_op(rng)});
        edges.push_back({base, base + 1, 1});
        edges.push_back({pick(rng, 0, base - 1), base, 1});
        BlockGraph grown = make_block_graph(std::move(ops), std::move(edges));
        CHECK(check_signature(comp, grown).matched);
    }
}

TEST_CASE("broadening a literal never breaks a match") {
    Rng rng(70707);
    for (int round = 0; round < 60; ++round) {
        ComponentSignature comp = random_component(rng, 3);
        comp.min_repeats = 1;  // a single plant realizes the component once
        BlockGraph bg = random_block_graph(rng, &comp, 1, 14);
        REQUIRE(check_signature(comp, bg).matched);

        std::vector<std::pair<std::size_t, std::size_t>> literals;
        for (std::size_t b = 0; b < comp.blocks.size(); ++b) {
            for (std::size_t o = 0; o < comp.blocks[b].ops.size(); ++o) {
                if (comp.blocks[b].ops[o].kind == OpPattern::Kind::Literal) {
                    literals.push_back({b, o});
                }
            }
        }
        if (literals.empty()) continue;
        auto [b, o] = literals[pick(rng, 0, literals.size() - 1)];
        ComponentSignature widened = comp;
        widened.blocks[b].ops[o] =
            parse_op_pattern(chance(rng, 0.5) ? "?" : "*", "t");
        CHECK(check_signature(widened, bg).matched);
    }
}

TEST_CASE("a literal transcript of a fragment matches wherever it embeds") {
    Rng rng(80808);
    for (int round = 0; round < 60; ++round) {
        // Literal-only component standing in for a fragment transcript.
        ComponentSignature comp = random_component(rng, 3);
        for (BlockPattern& block : comp.blocks) {
            block.repeats_min = block.repeats_max = 1;
            for (OpPattern& op : block.ops) {
                if (op.kind != OpPattern::Kind::Literal) {
                    op = parse_op_pattern(random_op(rng), "t");
                }
            }
        }
        for (EdgePattern& e : comp.edges) e.min_repeats = 1;
        comp.min_repeats = 1;

        BlockGraph bg = random_block_graph(rng, &comp, 1, 16);
        CHECK(check_signature(comp, bg).matched);
        if (bg.blocks.size() <= 20) {
            CHECK(brute_force_match(comp, bg));
        }
    }
}
