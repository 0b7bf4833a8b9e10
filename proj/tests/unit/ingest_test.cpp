/*
 * Copyright 2026 The Voidscope Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <algorithm>
#include <cctype>
#include <random>
#include <regex>

#include "voidscope/error.hpp"
#include "voidscope/ingest.hpp"
#include "voidscope/text.hpp"
#include "voidscope/url.hpp"

namespace voidscope {
namespace {

// Independent form decoder: '+' is a space, %XX is a byte.
std::string FormDecode(const std::string& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '+') {
      out += ' ';
    } else if (s[i] == '%' && i + 2 < s.size()) {
      out += static_cast<char>(std::stoi(s.substr(i + 1, 2), nullptr, 16));
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

std::vector<Lexicon> SampleLexicons() {
  return LoadLexiconCsv(std::string(VOIDSCOPE_SOURCE_DIR) + "/data/lexicons.csv");
}

TEST(ExtractDirective, GoogleQuery) {
  auto d = ExtractDirective("https://google.com/search?q=vaccines+cause+autism",
                            EngineRules::Default());
  ASSERT_TRUE(d.has_value());
  EXPECT_EQ(d->engine, Engine::kGoogle);
  EXPECT_EQ(d->raw_query, "vaccines cause autism");
}

TEST(ExtractDirective, NoQueryParameter) {
  EXPECT_FALSE(ExtractDirective("https://google.com/search", EngineRules::Default()));
  EXPECT_FALSE(ExtractDirective("https://www.google.com/", EngineRules::Default()));
  EXPECT_FALSE(ExtractDirective("https://google.com/search?q=+++", EngineRules::Default()));
}

TEST(ExtractDirective, DuckDuckGoMatchesDecodingOracle) {
  auto d = ExtractDirective("https://duckduckgo.com/?q=a%20b", EngineRules::Default());
  ASSERT_TRUE(d.has_value());
  EXPECT_EQ(d->engine, Engine::kDuckDuckGo);
  EXPECT_EQ(d->raw_query, FormDecode("a%20b"));
  EXPECT_EQ(d->raw_query, "a b");
}

TEST(ExtractDirective, CountryDomainsAndOtherEngines) {
  const auto& rules = EngineRules::Default();
  auto uk = ExtractDirective("https://www.google.co.uk/search?hl=en&q=ginko", rules);
  ASSERT_TRUE(uk);
  EXPECT_EQ(uk->raw_query, "ginko");
  auto bing = ExtractDirective("https://www.bing.com/search?q=mrna+prions", rules);
  ASSERT_TRUE(bing);
  EXPECT_EQ(bing->engine, Engine::kBing);
  auto yandex = ExtractDirective("https://yandex.ru/search/?text=vril", rules);
  ASSERT_TRUE(yandex);
  EXPECT_EQ(yandex->engine, Engine::kYandex);
  EXPECT_FALSE(ExtractDirective("https://example.com/search?q=x", rules));
  EXPECT_FALSE(ExtractDirective("https://notgoogle.com/search?q=x", rules));
}

TEST(ExtractDirective, MalformedUrlThrows) {
  try {
    ExtractDirective("not a url", EngineRules::Default());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformedUrl);
  }
}

TEST(Url, BracketedHosts) {
  const Url v6 = Url::Parse("http://[::1]:8080/search?q=x");
  EXPECT_EQ(v6.host, "[::1]");
  EXPECT_EQ(v6.port, "8080");
  EXPECT_EQ(Url::Parse("https://WWW.Example.com:443/a#frag").host, "www.example.com");
  for (const char* bad : {"http://[broken-host/search?q=x", "http://[zz]/", "http://a[b]/",
                          "http://[::1]x/", "http://host:8o/"}) {
    try {
      Url::Parse(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kMalformedUrl) << bad;
    }
  }
}

TEST(EngineRules, DefaultTableHas25Engines) {
  std::vector<Engine> engines;
  for (const auto& r : EngineRules::Default().rules()) engines.push_back(r.engine);
  std::sort(engines.begin(), engines.end());
  engines.erase(std::unique(engines.begin(), engines.end()), engines.end());
  EXPECT_EQ(engines.size(), static_cast<std::size_t>(kEngineCount));
  for (int i = 0; i < kEngineCount; ++i) {
    const auto e = static_cast<Engine>(i);
    EXPECT_EQ(EngineFromName(EngineName(e)), e);
  }
}

TEST(NormalizeQuery, Truncates40Tokens) {
  std::string raw;
  for (int i = 0; i < 40; ++i) raw += "word" + std::to_string(i) + " ";
  Query q = NormalizeQuery(raw);
  EXPECT_TRUE(q.truncated);
  EXPECT_EQ(q.tokens.size(), 32u);
  EXPECT_EQ(q.original_token_count, 40);
  EXPECT_EQ(q.truncated_token_count, 32);
  EXPECT_EQ(q.tokens.back(), "word31");
  EXPECT_EQ(q.char_count, static_cast<int>(text::CodePointCount(q.text)));
  EXPECT_EQ(q.text.substr(q.text.size() - 6), "word31");
}

TEST(NormalizeQuery, ThirtyTwoIsNotTruncated) {
  std::string raw;
  for (int i = 0; i < 32; ++i) raw += "w ";
  Query q = NormalizeQuery(raw);
  EXPECT_FALSE(q.truncated);
  EXPECT_EQ(q.tokens.size(), 32u);
}

TEST(NormalizeQuery, SimpleAndDegenerate) {
  Query cars = NormalizeQuery("cars");
  EXPECT_EQ(cars.tokens, std::vector<std::string>{"cars"});
  EXPECT_FALSE(cars.truncated);
  EXPECT_EQ(cars.char_count, 4);

  Query emoji = NormalizeQuery("\xF0\x9F\x98\x82 \xF0\x9F\x94\xA5\xF0\x9F\x94\xA5");
  EXPECT_EQ(emoji.truncated_token_count, 0);
  EXPECT_TRUE(emoji.tokens.empty());
  EXPECT_EQ(emoji.text, "");
  EXPECT_EQ(emoji.char_count, 0);

  EXPECT_EQ(NormalizeQuery("?!... ---").truncated_token_count, 0);
  EXPECT_EQ(NormalizeQuery("").truncated_token_count, 0);
}

TEST(NormalizeQuery, QuotedPhrasesSplitIntoTokens) {
  Query q = NormalizeQuery("  \"vril   lizard\"  facts! ");
  EXPECT_EQ(q.tokens, (std::vector<std::string>{"vril", "lizard", "facts"}));
  EXPECT_EQ(q.text, "\"vril lizard\" facts!");
}

TEST(NormalizeQuery, PreservesDisplayCase) {
  Query q = NormalizeQuery("Mountain DEW");
  EXPECT_EQ(q.tokens, (std::vector<std::string>{"Mountain", "DEW"}));
  EXPECT_EQ(TokenizeLower(q.text), (std::vector<std::string>{"mountain", "dew"}));
}

TEST(NormalizeQuery, TruncationIdempotenceProperty) {
  std::mt19937_64 rng(11);
  const std::vector<std::string> vocab = {"a", "\"b", "c)", "...", "\xF0\x9F\x98\x82",
                                          "site:x.com", "d-e", "(f", "g!", "h"};
  for (int trial = 0; trial < 1000; ++trial) {
    std::string raw;
    const int n = static_cast<int>(rng() % 60);
    for (int i = 0; i < n; ++i) {
      raw += vocab[rng() % vocab.size()];
      raw += (rng() % 4 == 0) ? "  " : " ";
    }
    Query once = NormalizeQuery(raw);
    Query twice = NormalizeQuery(once.text);
    ASSERT_EQ(once.tokens, twice.tokens) << raw;
    ASSERT_FALSE(twice.truncated);
    ASSERT_LE(once.tokens.size(), 32u);
  }
}

TEST(DetectOperators, Examples) {
  OperatorSet one = DetectOperators(NormalizeQuery("ginko site:naturalnews.com"));
  EXPECT_EQ(one.count(Operator::kSite), 1);
  EXPECT_EQ(one.total(), 1);
  EXPECT_TRUE(one.has_any());

  EXPECT_FALSE(DetectOperators(NormalizeQuery("covid vaccine")).has_any());

  std::string compound = "ivermectin";
  for (int i = 0; i < 15; ++i) {
    compound += (i == 0 ? " (" : " OR ");
    compound += "site:outlet" + std::to_string(i) + ".com";
  }
  compound += ")";
  OperatorSet many = DetectOperators(NormalizeQuery(compound));
  EXPECT_EQ(many.count(Operator::kSite), 15);
  EXPECT_EQ(many.total(), 15);
}

TEST(DetectOperators, QuotesParensAndCase) {
  OperatorSet s = DetectOperators("\"intitle:vaccine\" (filetype:pdf) SITE:cdc.gov");
  EXPECT_EQ(s.count(Operator::kIntitle), 1);
  EXPECT_EQ(s.count(Operator::kFiletype), 1);
  EXPECT_EQ(s.count(Operator::kSite), 1);
  // allintitle: is not counted as intitle:, and "website:" is not site:.
  OperatorSet t = DetectOperators("allintitle:x website:y allinurl:z inurl:w");
  EXPECT_EQ(t.count(Operator::kAllintitle), 1);
  EXPECT_EQ(t.count(Operator::kIntitle), 0);
  EXPECT_EQ(t.count(Operator::kSite), 0);
  EXPECT_EQ(t.count(Operator::kAllinurl), 1);
  EXPECT_EQ(t.count(Operator::kInurl), 1);
}

TEST(DetectOperators, MatchesRegexOracleOnRandomStrings) {
  const std::vector<std::string> ops = {"site", "inurl", "filetype", "intitle",
                                        "ext", "before", "source", "related",
                                        "allintitle", "after", "allinurl"};
  const std::vector<std::string> fillers = {"covid", "(", ")", "\"", "OR", "x.com",
                                            "website", "a:b", "|", "[", "{"};
  const std::regex oracle(
      "(^|[\\s\"'()\\[{|])(site|inurl|filetype|intitle|ext|before|source|related|"
      "allintitle|after|allinurl):",
      std::regex::icase);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    std::string s;
    const int n = 1 + static_cast<int>(rng() % 12);
    bool has_op = false;
    for (int i = 0; i < n; ++i) {
      if (rng() % 2 == 0) {
        std::string op = ops[rng() % ops.size()];
        if (rng() % 5 == 0) {
          for (char& c : op) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        }
        s += op + ":" + "v" + std::to_string(i);
        has_op = true;
      } else {
        s += fillers[rng() % fillers.size()];
      }
      const int sep = static_cast<int>(rng() % 4);
      s += sep == 0 ? "" : (sep == 1 ? "(" : " ");
    }
    if (!has_op) s += " site:x";
    int expected = 0;
    for (auto it = std::sregex_iterator(s.begin(), s.end(), oracle);
         it != std::sregex_iterator(); ++it) {
      ++expected;
    }
    ASSERT_EQ(DetectOperators(s).total(), expected) << s;
  }
}

TEST(Lexicons, LoadedTermsIncludeHashtagForms) {
  auto lex = SampleLexicons();
  bool found = false;
  for (const auto& l : lex) {
    for (const auto& t : l.terms) {
      if (t == "vaccines kill") found = true;
      EXPECT_EQ(t, text::ToLowerAscii(t));
    }
  }
  EXPECT_TRUE(found);
}

TEST(Lexicons, TaggingExamples) {
  auto lex = SampleLexicons();
  TopicTags a = TagLexicons(NormalizeQuery("9/11 inside job proof"), lex);
  EXPECT_TRUE(a.conspiracy);
  EXPECT_FALSE(a.political);
  EXPECT_FALSE(a.matched_terms.empty());

  TopicTags dew = TagLexicons(NormalizeQuery("mountain dew"), lex);
  EXPECT_FALSE(dew.conspiracy);
  EXPECT_FALSE(TagLexicons(NormalizeQuery("#dew"), lex).conspiracy);

  TopicTags empty = TagLexicons(NormalizeQuery(""), lex);
  EXPECT_FALSE(empty.conspiracy);
  EXPECT_FALSE(empty.political);

  EXPECT_TRUE(TagLexicons(NormalizeQuery("#VaccinesKill"), lex).conspiracy);
  EXPECT_TRUE(TagLexicons(NormalizeQuery("do vaccines kill"), lex).conspiracy);
  EXPECT_TRUE(TagLexicons(NormalizeQuery("stop the steal rally"), lex).political);
}

TEST(Lexicons, CaseInvariance) {
  auto lex = SampleLexicons();
  for (const char* s : {"9/11 Inside Job", "ELECTION FRAUD", "Vril Society", "plain words"}) {
    TopicTags lower = TagLexicons(NormalizeQuery(text::ToLowerAscii(s)), lex);
    TopicTags mixed = TagLexicons(NormalizeQuery(s), lex);
    EXPECT_EQ(lower.conspiracy, mixed.conspiracy);
    EXPECT_EQ(lower.political, mixed.political);
    EXPECT_EQ(lower.matched_terms, mixed.matched_terms);
  }
}

TEST(Lexicons, EmptyLexiconIsAnError) {
  std::vector<Lexicon> none;
  try {
    TagLexicons(NormalizeQuery("x"), none);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyLexicon);
  }
}

TEST(Perturbations, Examples) {
  Query q = NormalizeQuery("vril lizard");
  EXPECT_EQ(ToggleQuotes(q.text), "\"vril lizard\"");
  EXPECT_EQ(ToggleQuotes("\"vril lizard\""), "vril lizard");
  EXPECT_EQ(PluralizeQuery(q.text), "vril lizards");
  EXPECT_EQ(InjectTypos(q.text, 0.0, 99), q.text);

  PerturbationSpec spec;
  spec.pluralize = true;
  spec.typo_probability = 0.1;
  spec.quote_toggle = true;
  auto variants = GeneratePerturbations(q, spec, 7);
  ASSERT_EQ(variants.size(), 3u);
  EXPECT_EQ(variants[0].text, "vril lizards");
  EXPECT_EQ(variants[2].text, "\"vril lizard\"");
}

TEST(Perturbations, PluralRules) {
  EXPECT_EQ(PluralizeWord("conspiracy"), "conspiracies");
  EXPECT_EQ(PluralizeWord("box"), "boxes");
  EXPECT_EQ(PluralizeWord("child"), "children");
  EXPECT_EQ(PluralizeWord("Lizard"), "Lizards");
  EXPECT_EQ(PluralizeWord("sheep"), "sheep");
}

TEST(Perturbations, DeterministicForSeed) {
  Query q = NormalizeQuery("advanced search result manipulation technology");
  PerturbationSpec spec;
  spec.typo_probability = 0.3;
  auto a = GeneratePerturbations(q, spec, 42);
  auto b = GeneratePerturbations(q, spec, 42);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0].text, b[0].text);
  EXPECT_NE(a[0].text, q.text);
  EXPECT_EQ(InjectTypos(q.text, 1.0, 5).size(), q.text.size());
}

TEST(Perturbations, TypoProbabilityValidated) {
  EXPECT_THROW(InjectTypos("abc", 1.5, 1), Error);
  EXPECT_THROW(InjectTypos("abc", -0.1, 1), Error);
}

}  // namespace
}  // namespace voidscope
