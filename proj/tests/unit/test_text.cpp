#include <doctest.h>

#include <sstream>

#include "probe/error.hpp"
#include "probe/text.hpp"

using namespace probe;

namespace {

CaptionSet captions(const std::vector<std::string>& texts) {
  std::vector<Caption> out;
  for (std::size_t i = 0; i < texts.size(); ++i) out.push_back({"img" + std::to_string(i), texts[i]});
  return CaptionSet(std::move(out));
}

}  // namespace

TEST_SUITE("tokenize") {
  TEST_CASE("lowercases and splits on punctuation") {
    CHECK(tokenize("The the") == std::vector<std::string>{"the", "the"});
    CHECK(tokenize("sun-set!") == std::vector<std::string>{"sun", "set"});
    CHECK(tokenize("  A dog,  2 cats.") == std::vector<std::string>{"a", "dog", "2", "cats"});
    CHECK(tokenize("...").empty());
    CHECK(tokenize("").empty());
  }

  TEST_CASE("non-ASCII bytes stay inside tokens") {
    CHECK(tokenize("Caf\xc3\xa9 au lait") ==
          std::vector<std::string>{"caf\xc3\xa9", "au", "lait"});
    CHECK(tokenize("\xc3\x89T\xc3\x89") == std::vector<std::string>{"\xc3\x89t\xc3\x89"});
  }
}

TEST_SUITE("count_vectorize") {
  TEST_CASE("single caption") {
    const auto cv = count_vectorize(captions({"a a b"}));
    CHECK(cv.vocabulary.tokens == std::vector<std::string>{"a", "b"});
    REQUIRE(cv.features.data.rows() == 1);
    CHECK(cv.features.data(0, 0) == 2.0);
    CHECK(cv.features.data(0, 1) == 1.0);
    CHECK(cv.features.layer_name == kCountVectorizerLayer);
    CHECK(cv.vocabulary.total_tokens == 3);
  }

  TEST_CASE("hand built count matrix") {
    const auto cv = count_vectorize(captions({"A red car", "a blue car, a red sky", "Sky!"}));
    const std::vector<std::string> vocab{"a", "blue", "car", "red", "sky"};
    CHECK(cv.vocabulary.tokens == vocab);
    Eigen::MatrixXd expected(3, 5);
    expected << 1, 0, 1, 1, 0,
                2, 1, 1, 1, 1,
                0, 0, 0, 0, 1;
    CHECK(cv.features.data == expected);
    CHECK(cv.features.image_ids == std::vector<std::string>{"img0", "img1", "img2"});
    CHECK(cv.vocabulary.find("car") == 2);
    CHECK(cv.vocabulary.find("boat") == 5);
  }

  TEST_CASE("min_count thresholds on corpus frequency") {
    const auto cv = count_vectorize(captions({"a red car", "a blue car", "a sky"}), 2);
    CHECK(cv.vocabulary.tokens == std::vector<std::string>{"a", "car"});
    CHECK(cv.vocabulary.total_tokens == 5);
    CHECK(cv.features.data.col(0).sum() == 3.0);
    CHECK_THROWS_AS(count_vectorize(captions({"a b", "c d"}), 2), DataError);
    CHECK_THROWS_AS(count_vectorize(captions({"!!!", "..."})), DataError);
  }

  TEST_CASE("permuting captions permutes rows only") {
    const std::vector<std::string> texts{"x y z", "y y", "z q", "w"};
    const auto base = count_vectorize(captions(texts));
    const std::vector<std::size_t> order{2, 0, 3, 1};
    std::vector<Caption> shuffled;
    for (auto i : order) shuffled.push_back({"img" + std::to_string(i), texts[i]});
    const auto moved = count_vectorize(CaptionSet(shuffled));
    CHECK(moved.vocabulary.tokens == base.vocabulary.tokens);
    for (std::size_t r = 0; r < order.size(); ++r) {
      CHECK(moved.features.data.row(static_cast<Eigen::Index>(r)) ==
            base.features.data.row(static_cast<Eigen::Index>(order[r])));
    }
  }
}

TEST_SUITE("captions") {
  TEST_CASE("parse with quoting") {
    std::istringstream in("image_id,caption\nimg1,\"a cat, sitting\"\nimg2,dog\n");
    const auto set = parse_captions(in);
    REQUIRE(set.size() == 2);
    CHECK(set.captions()[0].text == "a cat, sitting");
    CHECK(set.image_ids() == std::vector<std::string>{"img1", "img2"});
    set.check_order({"img1", "img2"});
    CHECK_THROWS_AS(set.check_order({"img2", "img1"}), DataError);
    CHECK_THROWS_AS(set.check_order({"img1"}), DataError);
  }

  TEST_CASE("rejects bad input") {
    std::istringstream header("id,text\na,b\n");
    CHECK_THROWS_AS(parse_captions(header), DataError);
    std::istringstream empty_caption("image_id,caption\nimg1,\n");
    CHECK_THROWS_AS(parse_captions(empty_caption), DataError);
    std::istringstream duplicate("image_id,caption\nimg1,a\nimg1,b\n");
    CHECK_THROWS_AS(parse_captions(duplicate), DataError);
    CHECK_THROWS_AS(load_captions("/nonexistent/captions.csv"), DataError);
  }
}
