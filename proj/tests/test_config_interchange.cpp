#include <doctest.h>

#include <random>
#include <sstream>

#include "hiertrack/config.hpp"
#include "hiertrack/error.hpp"
#include "hiertrack/interchange.hpp"
#include "test_util.hpp"

using namespace hiertrack;

namespace {

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return Errc::IOFailure;
}

FrameDecision sample_decision(std::mt19937_64& rng, int frame) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  FrameDecision d;
  d.frame_index = frame;
  d.chosen = frame % 3;
  for (int k = 0; k < 3; ++k) {
    ScoreBreakdown b{u(rng), u(rng), {}, u(rng), false};
    if (frame % 2 == 0) {
      b.s_fine = u(rng);
      b.fine_used = true;
    }
    d.breakdowns.push_back(b);
  }
  d.chosen_bbox = BBox{u(rng) * 100, u(rng) * 100, 1 + u(rng) * 10, 1 + u(rng) * 10};
  d.visible = u(rng) < 0.5;
  d.kf_updated = u(rng) < 0.5;
  d.fine_used = frame % 2 == 0;
  d.track_failure = frame % 5 == 0;
  return d;
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("key-value files") {
  const auto kv = KeyValueFile::parse("# comment\n a = 1 \n\nb.c = two words\na = 3\n");
  CHECK(kv.get("a") == "3");
  CHECK(kv.get("b.c") == "two words");
  CHECK(kv.entries().front().first == "a");
  CHECK(kv.with_prefix("b.").size() == 1);
  CHECK_FALSE(kv.contains("z"));
  CHECK(code_of([] { KeyValueFile::parse("no equals sign\n"); }) == Errc::ParseError);
  CHECK(format_double(0.1) == "0.1");
  CHECK(parse_double(format_double(1.0 / 3.0), "x") == 1.0 / 3.0);
}

TEST_CASE("defaults match the shipped config file") {
  const Config shipped = Config::from_kv(KeyValueFile::load(configs_dir() + "/default.cfg"));
  CHECK(shipped.to_kv().dump() == Config{}.to_kv().dump());
  CHECK(Config{}.selector.update_floor() == Config{}.selector.tau);
}

TEST_CASE("round trip through key-value text") {
  Config c;
  c.selector.alpha = 0.125;
  c.selector.kf_update_floor = 0.4;
  c.memory.k_lm = 7;
  c.selector.kf.r = 2.5;
  c.seed = 99;
  c.toggles = Toggles::parse("kf,lm");
  const Config back = Config::from_kv(KeyValueFile::parse(c.to_kv().dump()));
  CHECK(back.to_kv().dump() == c.to_kv().dump());
  CHECK(back.selector.update_floor() == 0.4);
  CHECK(back.toggles == c.toggles);
}

TEST_CASE("overrides and validation") {
  Config c;
  apply_override(c, "kf.r=2");
  apply_override(c, " tau = 0.75 ");
  CHECK(c.selector.kf.r == 2.0);
  CHECK(c.selector.tau == 0.75);
  CHECK(code_of([&] { apply_override(c, "nonsense=1"); }) == Errc::InvalidConfig);
  CHECK(code_of([&] { apply_override(c, "tau"); }) == Errc::InvalidConfig);
  CHECK(code_of([] { Config::from_kv(KeyValueFile::parse("alpha = 0.7\nbeta = 0.6\n")); }) == Errc::InvalidConfig);
  CHECK(code_of([] { Config::from_kv(KeyValueFile::parse("tau = 1.5\n")); }) == Errc::InvalidConfig);
  CHECK(code_of([] { Config::from_kv(KeyValueFile::parse("n_sm = 0\n")); }) == Errc::InvalidConfig);
  CHECK(code_of([] { Config::from_kv(KeyValueFile::parse("k_lm = 0\n")); }) == Errc::InvalidConfig);
  CHECK(code_of([] { Config::from_kv(KeyValueFile::parse("alpha = abc\n")); }) == Errc::InvalidConfig);
}

TEST_CASE("toggle semantics") {
  CHECK(Toggles::parse("all") == Toggles{});
  CHECK(Toggles::parse("none").label() == "none");
  CHECK(Toggles::parse("SM, kf").label() == "kf,sm");
  CHECK(code_of([] { Toggles::parse("kf,xx"); }) == Errc::InvalidConfig);

  Config c;
  c.toggles = Toggles::parse("sm");
  const SelectorConfig s = c.effective_selector();
  CHECK(s.alpha == 0.0);
  CHECK(s.beta == 0.0);
  CHECK_FALSE(s.fine_enabled);
  CHECK(s.motion_enabled);
  const MemoryConfig m = c.effective_memory();
  CHECK(m.short_filtered);
  CHECK_FALSE(m.long_enabled);

  c.toggles = Toggles::parse("none");
  CHECK_FALSE(c.effective_selector().motion_enabled);
  CHECK_FALSE(c.effective_memory().short_filtered);
}

}

TEST_SUITE("interchange") {

TEST_CASE("records round-trip without loss") {
  std::mt19937_64 rng(21);
  std::ostringstream out;
  io::Writer w(out);
  io::Header h;
  h.width = 32;
  h.height = 24;
  h.frame_count = 4;
  h.track_source = "recorded";
  h.seed = 1234567890123ULL;
  w.header(h);
  const BinaryMask prompt = rect_mask(32, 24, 3, 4, 5, 6);
  w.prompt(0, prompt);
  std::vector<io::GtRecord> gts;
  std::vector<FrameDecision> decisions;
  for (int f = 0; f < 4; ++f) {
    const BinaryMask m = rect_mask(32, 24, 3 + f, 4, 5, 6);
    gts.push_back({f, f != 2, f != 2 ? mask_to_bbox(m) : BBox{}, f != 2 ? m : BinaryMask(32, 24)});
    w.gt(gts.back());
    if (f > 0) {
      w.proposal(f, 0, Proposal{m, 0.8125, 0.5});
      w.proposal(f, 1, Proposal{BinaryMask(32, 24), 0.1, 0.0});
    }
    decisions.push_back(sample_decision(rng, f));
    w.decision(decisions.back());
  }
  TrackBundle tb;
  tb.origin_frame = 3;
  tb.frames = {2, 1};
  tb.points.push_back({{4.5, 5.25}, {{3.5, 5.25}, {2.5, 5.0}}, {true, false}});
  w.tracks(tb);

  MemoryBank bank = make_bank(prompt);
  MemoryEntry e;
  e.frame_index = 2;
  e.mask = prompt;
  e.s_conf = 0.7;
  e.s_iou = 0.9;
  e.distinctive = true;
  e.separation = 0.0625;
  bank.short_term.push_back(e);
  bank.long_term.push_back(e);
  w.memory(io::snapshot(3, bank));
  w.record("summary", io::Json{{"frames", 4}});

  std::istringstream in(out.str());
  const io::Dump d = io::read_dump(in);
  REQUIRE(d.header);
  CHECK(d.header->width == 32);
  CHECK(d.header->seed == h.seed);
  CHECK(d.header->track_source == "recorded");
  CHECK(d.prompt == prompt);
  CHECK(d.gt == gts);
  CHECK(d.decisions == decisions);
  REQUIRE(d.proposals.size() == 3);
  CHECK(d.proposals.at(1)[0].s_iou == 0.8125);
  CHECK(d.proposals.at(2)[1].mask.empty());
  REQUIRE(d.tracks.size() == 1);
  CHECK(d.tracks[0] == tb);
  REQUIRE(d.memory.size() == 1);
  CHECK(d.memory[0] == io::snapshot(3, bank));
  CHECK(d.other.size() == 1);
  CHECK(d.skipped == 0);
}

TEST_CASE("unknown records are skipped with a warning") {
  std::istringstream in(R"({"type":"mystery","schema_version":1}
{"type":"gt","schema_version":1,"frame":0,"visible":false,"bbox":[0,0,0,0],"mask":{"width":2,"height":2,"runs":[]}}
)");
  std::ostringstream warn;
  const io::Dump d = io::read_dump(in, &warn);
  CHECK(d.skipped == 1);
  CHECK(d.gt.size() == 1);
  CHECK(warn.str().find("mystery") != std::string::npos);
}

TEST_CASE("bad input is reported with its line") {
  auto read = [](const std::string& text) {
    std::istringstream in(text);
    return io::read_dump(in);
  };
  CHECK(code_of([&] { read("{\"type\":\"gt\",\"schema_version\":2}\n"); }) == Errc::SchemaVersionMismatch);
  CHECK(code_of([&] { read("not json\n"); }) == Errc::ParseError);
  CHECK(code_of([&] { read("{\"type\":\"gt\"}\n"); }) == Errc::ParseError);
  CHECK(code_of([&] { read("{\"type\":\"gt\",\"schema_version\":1,\"frame\":0}\n"); }) == Errc::ParseError);
  CHECK(code_of([&] {
          read("{\"type\":\"prompt\",\"schema_version\":1,\"frame\":0,"
               "\"mask\":{\"width\":4,\"height\":4,\"runs\":[[3,2],[1,1]]}}\n");
        }) == Errc::ParseError);
  try {
    read("\n\n{oops\n");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK(code_of([] { io::read_dump_file("/nonexistent/dump.jsonl"); }) == Errc::IOFailure);
}

}
