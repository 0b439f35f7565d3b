#include <doctest.h>

#include <fstream>
#include <set>

#include "bovw/corpus.hpp"
#include "bovw/error.hpp"
#include "support/temp_dir.hpp"

using bovw::DatasetManifest;

namespace {

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

DatasetManifest many_classes(std::size_t n_classes) {
  std::vector<bovw::ManifestEntry> entries;
  for (std::size_t c = 0; c < n_classes; ++c) {
    for (int i = 0; i < 2; ++i) {
      entries.push_back({"img_" + std::to_string(c) + "_" + std::to_string(i) + ".pgm", "class_" + std::to_string(c)});
    }
  }
  return DatasetManifest("many", entries);
}

}  // namespace

TEST_CASE("load_manifest parses entries, comments and blank lines") {
  testing::TempDir dir;
  write_text(dir / "set.tsv", "# header comment\nb/1.pgm\tb\n\na/1.pgm\ta\n");
  const auto m = bovw::load_manifest(dir / "set.tsv");
  CHECK(m.name() == "set");
  REQUIRE(m.size() == 2);
  CHECK(m.entries()[0].image_path == "b/1.pgm");
  CHECK(m.entries()[1].class_label == "a");
  CHECK(m.classes() == std::vector<std::string>{"a", "b"});
  CHECK(m.class_index("a") == 0);
  CHECK(m.resolve(m.entries()[0]) == dir.path() / "b/1.pgm");
}

TEST_CASE("load_manifest error paths") {
  testing::TempDir dir;
  SUBCASE("missing file") { CHECK_THROWS_AS(bovw::load_manifest(dir / "nope.tsv"), bovw::Error); }
  SUBCASE("malformed line reports the line number") {
    write_text(dir / "bad.tsv", "a.pgm\tx\nno-tab-here\n");
    CHECK_THROWS_WITH_AS(bovw::load_manifest(dir / "bad.tsv"), doctest::Contains(":2:"), bovw::Error);
  }
  SUBCASE("duplicate path names the path") {
    write_text(dir / "dup.tsv", "a.pgm\tx\nb.pgm\ty\na.pgm\ty\n");
    CHECK_THROWS_WITH_AS(bovw::load_manifest(dir / "dup.tsv"), doctest::Contains("a.pgm"), bovw::Error);
  }
  SUBCASE("empty manifest") {
    write_text(dir / "empty.tsv", "# only a comment\n\n");
    CHECK_THROWS_AS(bovw::load_manifest(dir / "empty.tsv"), bovw::Error);
  }
}

TEST_CASE("manifest round-trips through write and load") {
  testing::TempDir dir;
  const auto m = many_classes(5);
  std::filesystem::create_directories(dir / "copy");
  bovw::write_manifest(m, dir / "copy" / "many.tsv");
  CHECK(bovw::load_manifest(dir / "copy" / "many.tsv") == m);
}

TEST_CASE("101-class manifest indexes the lexicographically first class as 0") {
  const auto m = many_classes(101);
  CHECK(m.classes().size() == 101);
  CHECK(m.class_index("class_0") == 0);
  CHECK(m.class_index("class_1") == 1);
  CHECK(m.class_index("class_10") == 2);
  CHECK(std::is_sorted(m.classes().begin(), m.classes().end()));
}

TEST_CASE("PGM loading") {
  testing::TempDir dir;
  SUBCASE("4x4 all-zero image") {
    write_text(dir / "z.pgm", std::string("P5\n4 4\n255\n") + std::string(16, '\0'));
    const auto img = bovw::load_image(dir / "z.pgm");
    CHECK(img.width == 4);
    CHECK(img.height == 4);
    CHECK(img.pixels == std::vector<std::uint8_t>(16, 0));
  }
  SUBCASE("header comments and exact intensities") {
    write_text(dir / "c.pgm", std::string("P5 # made by hand\n3 1\n255\n") + "\x01\x80\xff");
    const auto img = bovw::load_image(dir / "c.pgm");
    CHECK(img.pixels == std::vector<std::uint8_t>{1, 128, 255});
  }
  SUBCASE("maxval 65535 is rejected") {
    write_text(dir / "w.pgm", std::string("P5\n2 2\n65535\n") + std::string(8, '\0'));
    CHECK_THROWS_WITH_AS(bovw::load_image(dir / "w.pgm"), doctest::Contains("unsupported maxval"), bovw::Error);
  }
  SUBCASE("2x3 image with 5 payload bytes is truncated") {
    write_text(dir / "t.pgm", std::string("P5\n2 3\n255\n") + std::string(5, 'a'));
    CHECK_THROWS_WITH_AS(bovw::load_image(dir / "t.pgm"), doctest::Contains("truncated"), bovw::Error);
  }
  SUBCASE("ASCII PGM is unsupported") {
    write_text(dir / "a.pgm", "P2\n1 1\n255\n0\n");
    CHECK_THROWS_WITH_AS(bovw::load_image(dir / "a.pgm"), doctest::Contains("unsupported format"), bovw::Error);
  }
  SUBCASE("save then load is the identity") {
    const bovw::Image img(3, 2, {0, 1, 2, 253, 254, 255});
    bovw::save_image(img, dir / "r.pgm");
    CHECK(bovw::load_image(dir / "r.pgm") == img);
  }
}

TEST_CASE("Image rejects a pixel count that does not match its size") {
  CHECK_THROWS_AS(bovw::Image(2, 2, std::vector<std::uint8_t>(3)), bovw::Error);
}

TEST_CASE("select_classes") {
  const auto m = many_classes(12);

  SUBCASE("full selection keeps every entry") {
    for (std::uint64_t seed : {0u, 7u, 99u}) CHECK(bovw::select_classes(m, 12, seed).entries() == m.entries());
  }
  SUBCASE("deterministic for fixed inputs") {
    CHECK(bovw::select_classes(m, 5, 42) == bovw::select_classes(m, 5, 42));
  }
  SUBCASE("nested across increasing counts for every seed") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      std::vector<std::string> previous;
      for (std::size_t count = 1; count <= 12; ++count) {
        const auto sel = bovw::select_classes(m, count, seed);
        CHECK(sel.classes().size() == count);
        for (const auto& c : previous) CHECK(std::binary_search(sel.classes().begin(), sel.classes().end(), c));
        previous = sel.classes();
      }
    }
  }
  SUBCASE("one class is contained in six") {
    const auto one = bovw::select_classes(m, 1, 3);
    const auto six = bovw::select_classes(m, 6, 3);
    CHECK(std::binary_search(six.classes().begin(), six.classes().end(), one.classes().front()));
  }
  SUBCASE("entry order is preserved") {
    const auto sel = bovw::select_classes(m, 4, 1);
    std::size_t cursor = 0;
    for (const auto& e : sel.entries()) {
      while (cursor < m.size() && !(m.entries()[cursor] == e)) ++cursor;
      CHECK(cursor < m.size());
    }
  }
  SUBCASE("out of range") {
    CHECK_THROWS_AS(bovw::select_classes(m, 0, 1), bovw::Error);
    CHECK_THROWS_AS(bovw::select_classes(m, 13, 1), bovw::Error);
  }
}
