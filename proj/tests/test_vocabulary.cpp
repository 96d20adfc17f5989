#include <doctest.h>

#include <fstream>

#include "semloc/error.hpp"
#include "semloc/vocabulary.hpp"

#include "test_support.hpp"

using namespace semloc;

TEST_CASE("normalize_label lowercases, trims and collapses whitespace") {
    CHECK(normalize_label("Chair") == "chair");
    CHECK(normalize_label("  potted   PLANT \t") == "potted plant");
    CHECK(normalize_label("cup") == "cup");
    CHECK(normalize_label("   ") == "");
    CHECK(normalize_label("Living Wall Portrait") == "living wall portrait");
}

TEST_CASE("from_labels identity merge") {
    auto vocab = Vocabulary::from_labels({"chair", "cup"}, {});
    CHECK(vocab.labels() == std::vector<std::string>{"chair", "cup"});
}

TEST_CASE("from_labels normalizes user extensions") {
    auto vocab = Vocabulary::from_labels({"chair"}, {"Living Wall Portrait"});
    CHECK(vocab.labels() == std::vector<std::string>{"chair", "living wall portrait"});
    CHECK(vocab.entries()[0].source == LabelSource::base);
    CHECK(vocab.entries()[1].source == LabelSource::user);
}

TEST_CASE("from_labels dedups across lists keeping the base entry") {
    auto vocab = Vocabulary::from_labels({"chair", "cup"}, {"CUP ", "desk"});
    CHECK(vocab.labels() == std::vector<std::string>{"chair", "cup", "desk"});
    CHECK(vocab.entries()[1].source == LabelSource::base);  // "cup" stays a base label
}

TEST_CASE("from_labels dedups within one list keeping the first occurrence") {
    auto vocab = Vocabulary::from_labels({"desk", "Desk", "  DESK  ", "door"}, {});
    CHECK(vocab.labels() == std::vector<std::string>{"desk", "door"});
}

TEST_CASE("from_labels rejects empty results") {
    CHECK_THROWS_AS(Vocabulary::from_labels({}, {}), InputError);
    CHECK_THROWS_AS(Vocabulary::from_labels({"  "}, {}), InputError);
}

TEST_CASE("contains uses normalized lookup") {
    auto vocab = Vocabulary::from_labels({"chair", "potted plant"}, {});
    CHECK(vocab.contains("CHAIR"));
    CHECK(vocab.contains(" potted  plant"));
    CHECK_FALSE(vocab.contains("sofa"));
}

TEST_CASE("without removes one label preserving order") {
    auto vocab = Vocabulary::from_labels({"a", "b", "c"}, {});
    CHECK(vocab.without("b").labels() == std::vector<std::string>{"a", "c"});
}

TEST_CASE("without normalizes the needle") {
    auto vocab = Vocabulary::from_labels({"chair", "cup"}, {});
    CHECK(vocab.without("CUP").labels() == std::vector<std::string>{"chair"});
}

TEST_CASE("without errors") {
    auto vocab = Vocabulary::from_labels({"a"}, {});
    CHECK_THROWS_AS(vocab.without("a"), InvariantError);  // would empty the vocabulary
    CHECK_THROWS_AS(vocab.without("zebra"), InputError);  // absent label
}

TEST_CASE("read_label_file skips comments and blank lines") {
    test::TempDir dir;
    const auto path = dir / "labels.txt";
    {
        std::ofstream out(path);
        out << "# base object classes\n"
            << "chair\n"
            << "\n"
            << "   \n"
            << "  # indented comment\n"
            << "potted plant\n";
    }
    CHECK(read_label_file(path) == std::vector<std::string>{"chair", "potted plant"});
}

TEST_CASE("read_label_file errors on a missing file") {
    test::TempDir dir;
    CHECK_THROWS_AS(read_label_file(dir / "nope.txt"), InputError);
}

TEST_CASE("load_vocabulary merges base and extension files") {
    test::TempDir dir;
    {
        std::ofstream base(dir / "base.txt");
        base << "chair\ncup\n";
        std::ofstream ext(dir / "ext.txt");
        ext << "Cup\ndesk\n";
    }
    auto vocab = load_vocabulary(dir / "base.txt", dir / "ext.txt");
    CHECK(vocab.labels() == std::vector<std::string>{"chair", "cup", "desk"});

    auto base_only = load_vocabulary(dir / "base.txt");
    CHECK(base_only.labels() == std::vector<std::string>{"chair", "cup"});
}

TEST_CASE("shipped base label file loads with 80 classes") {
    auto labels = read_label_file(test::data_dir() + "/coco_labels.txt");
    CHECK(labels.size() == 80);
    auto vocab = Vocabulary::from_labels(labels, {});
    CHECK(vocab.size() == 80);
    CHECK(vocab.contains("potted plant"));
}
