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

#include "oracles/test_support.hpp"
#include "voidscope/error.hpp"
#include "voidscope/html.hpp"
#include "voidscope/io.hpp"
#include "voidscope/json_io.hpp"
#include "voidscope/serp.hpp"

namespace voidscope {
namespace {

std::string Page(const std::string& topstuff, const std::string& rso,
                 const std::string& extra = "") {
  return "<html><body><div id=\"result-stats\">About 4,600,000 results (0.42 seconds)</div>"
         "<div id=\"topstuff\">" + topstuff + "</div><div id=\"search\">" + extra +
         "<div id=\"rso\">" + rso + "</div></div></body></html>";
}

std::string Block(const std::string& href, const std::string& title,
                  const std::string& cls = "g") {
  return "<div class=\"" + cls + "\"><a href=\"" + href + "\"><h3>" + title + "</h3></a></div>";
}

TEST(BannerCorpus, EveryFixtureClassifiedAsExpected) {
  const auto cases = testsupport::LoadBannerCases();
  ASSERT_GE(cases.size(), 10u);
  for (const auto& c : cases) {
    const std::string html =
        ReadTextFile(testsupport::FixtureDir() / "banners" / c.file);
    EXPECT_EQ(ParseSerp(html).banner.banner_type, c.expected) << c.file;
  }
}

TEST(ClassifyBanner, Phrasings) {
  EXPECT_EQ(ClassifyBanner("It looks like there aren't many great results for this search"),
            BannerType::kLowQuality);
  EXPECT_EQ(ClassifyBanner("It looks like there aren\xE2\x80\x99t any great results"),
            BannerType::kLowQuality);
  EXPECT_EQ(ClassifyBanner("there are not many great matches for your search"),
            BannerType::kLowRelevanceMany);
  EXPECT_EQ(ClassifyBanner("There aren't any great matches for your search"),
            BannerType::kLowRelevanceAny);
  EXPECT_EQ(ClassifyBanner("Your search - foo - did not match any documents."),
            BannerType::kLowRelevanceNoMatches);
  EXPECT_EQ(ClassifyBanner("These results are changing quickly"), BannerType::kRapidlyChanging);
  EXPECT_EQ(ClassifyBanner("Did you mean: foo"), BannerType::kOther);
  EXPECT_EQ(ClassifyBanner(""), BannerType::kNone);
  EXPECT_TRUE(IsLowRelevance(BannerType::kLowRelevanceNoMatches));
  EXPECT_FALSE(IsLowRelevance(BannerType::kLowQuality));
}

TEST(BannerType, NamesRoundTrip) {
  for (BannerType t : {BannerType::kNone, BannerType::kLowQuality, BannerType::kLowRelevanceMany,
                       BannerType::kLowRelevanceAny, BannerType::kLowRelevanceNoMatches,
                       BannerType::kRapidlyChanging, BannerType::kOther}) {
    EXPECT_EQ(BannerTypeFromName(BannerTypeName(t)), t);
  }
  EXPECT_FALSE(BannerTypeFromName("bogus").has_value());
}

TEST(ParseSerp, CaptchaAndEmptyPagesAreUnparseable) {
  const std::string captcha =
      ReadTextFile(testsupport::FixtureDir() / "banners" / "captcha.html");
  try {
    ParseSerp(captcha);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnparseableHtml);
    EXPECT_NE(std::string(e.what()).find("captcha"), std::string::npos);
  }
  try {
    ParseSerp("");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("no markup"), std::string::npos);
  }
  EXPECT_THROW(ParseSerp("<html><body><p>hello</p></body></html>"), Error);
}

TEST(ParseSerp, ResultTypesAndRanks) {
  const std::string ads =
      "<div id=\"tads\"><div data-text-ad=\"1\"><a href=\"https://shop.example.com/x\">"
      "<div role=\"heading\">Buy</div></a></div></div>";
  const std::string rso =
      Block("https://www.nytimes.com/a?utm_source=x", "NYT &amp; co") +
      "<g-section-with-header><div class=\"g\"><a href=\"https://apnews.com/n\"><h3>AP</h3>"
      "</a></div></g-section-with-header>" +
      Block("https://www.youtube.com/watch?v=1", "Clip", "g video-voyager") +
      "<div class=\"g\"><a href=\"/url?q=https://example.org/r&amp;sa=U\"><h3>Redirect</h3></a></div>"
      "<div class=\"g\"><a href=\"https://nohead.net/\">no heading</a></div>"
      "<div class=\"g\"><a href=\"/relative\"><h3>dropped</h3></a></div>" +
      Block("https://www.nytimes.com/a?utm_source=x", "Duplicate");
  const SerpRecord r = ParseSerp(Page("", rso, ads));
  ASSERT_EQ(r.results.size(), 7u);
  EXPECT_EQ(r.results[0].result_type, ResultType::kAd);
  EXPECT_EQ(r.results[0].rank, 1);
  EXPECT_EQ(r.results[0].title, "Buy");
  EXPECT_EQ(r.results[1].result_type, ResultType::kOrganic);
  EXPECT_EQ(r.results[1].title, "NYT & co");
  EXPECT_EQ(r.results[1].domain, "nytimes.com");
  EXPECT_EQ(r.results[1].rank, 2);
  EXPECT_EQ(r.results[2].result_type, ResultType::kNews);
  EXPECT_EQ(r.results[3].result_type, ResultType::kVideo);
  EXPECT_EQ(r.results[4].url, "https://example.org/r");
  EXPECT_EQ(r.results[5].result_type, ResultType::kOther);
  EXPECT_EQ(r.organic_count(), 6u);
  const auto ranked = r.RankedUrls();
  EXPECT_EQ(ranked.size(), 5u);  // ad skipped, duplicate collapsed
  EXPECT_EQ(ranked.front(), r.results[1].url);
  EXPECT_EQ(r.estimated_total_results, 4600000);
}

TEST(ParseSerp, BannerFromOutermostCard) {
  const std::string card =
      "<div class=\"card-section\"><div class=\"card-section\">It looks like there aren't "
      "many great matches for your search</div><a>Search tips</a></div>";
  const SerpRecord r = ParseSerp(Page(card, Block("https://a.com/", "A")));
  EXPECT_EQ(r.banner.banner_type, BannerType::kLowRelevanceMany);
  EXPECT_NE(r.banner.banner_text.find("Search tips"), std::string::npos);
}

TEST(ParseSerp, TruncationNoticeIsNotABanner) {
  const std::string notice =
      "<div class=\"card-section\">\"x\" (and any subsequent words) was ignored because we "
      "limit queries to 32 words.</div>";
  const SerpRecord r = ParseSerp(Page(notice, Block("https://a.com/", "A")));
  EXPECT_TRUE(r.truncation_notice);
  EXPECT_EQ(r.banner.banner_type, BannerType::kNone);
}

TEST(ParseSerp, ScriptContentIsNotMarkup) {
  const std::string page =
      "<html><script>document.write('<div id=\"rso\">')</script><body>hi</body></html>";
  EXPECT_THROW(ParseSerp(page), Error);
}

TEST(ParseResultCount, Formats) {
  EXPECT_EQ(ParseResultCount("About 4,600,000 results (0.42 seconds)"), 4600000);
  EXPECT_EQ(ParseResultCount("Page 2 of about 1,230 results (0.3 seconds)"), 1230);
  EXPECT_EQ(ParseResultCount("About 1\xC2\xA0" "230\xC2\xA0" "000 results"), 1230000);
  EXPECT_EQ(ParseResultCount("Environ 1 230 000 r\xC3\xA9sultats"), 1230000);
  EXPECT_EQ(ParseResultCount("Ungef\xC3\xA4hr 1.230.000 Ergebnisse"), 1230000);
  EXPECT_EQ(ParseResultCount("1 result"), 1);
  EXPECT_FALSE(ParseResultCount("No results").has_value());
  EXPECT_FALSE(ParseResultCount("").has_value());
}

TEST(PublicSuffix, RegistrableDomains) {
  const auto& psl = PublicSuffixList::Default();
  EXPECT_EQ(psl.RegistrableDomain("news.bbc.co.uk"), "bbc.co.uk");
  EXPECT_EQ(psl.RegistrableDomain("truth.blogspot.com"), "truth.blogspot.com");
  EXPECT_EQ(psl.RegistrableDomain("a.b.ck"), "a.b.ck");
  EXPECT_EQ(psl.RegistrableDomain("www.ck"), "www.ck");
  EXPECT_EQ(psl.RegistrableDomain("co.uk"), "co.uk");
  EXPECT_EQ(psl.RegistrableDomain("192.168.0.1"), "192.168.0.1");
  EXPECT_EQ(psl.RegistrableDomain("x.y.unlisted"), "y.unlisted");
  EXPECT_EQ(psl.RegistrableDomain("en.wikipedia.org"), "wikipedia.org");
}

TEST(PublicSuffix, CustomList) {
  const auto psl = PublicSuffixList::Parse("// test\ncom\nexample.com\n*.wild\n!ok.wild\n");
  EXPECT_EQ(psl.RegistrableDomain("a.b.example.com"), "b.example.com");
  EXPECT_EQ(psl.RegistrableDomain("a.b.wild"), "a.b.wild");
  EXPECT_EQ(psl.RegistrableDomain("x.ok.wild"), "ok.wild");
}

TEST(ExtractDomain, StripsWwwAndRejectsRelative) {
  EXPECT_EQ(ExtractDomain("https://www.nytimes.com/x"), "nytimes.com");
  EXPECT_EQ(ExtractDomain("https://WWW.Foxnews.COM/"), "foxnews.com");
  try {
    ExtractDomain("/relative/path");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidUrl);
  }
}

TEST(Html, EntitiesAndRecovery) {
  EXPECT_EQ(html::DecodeEntities("a&amp;b&#39;c&#x41;&lt;&unknown;"), "a&b'cA<&unknown;");
  const auto doc = html::Parse("<div id=x><p>one<p>two</span></div><br><img src=a>");
  const html::Node* x = html::FindById(*doc.root, "x");
  ASSERT_NE(x, nullptr);
  EXPECT_EQ(x->InnerText(), "one two");
  EXPECT_EQ(html::FindAll(*doc.root, [](const html::Node& n) { return n.tag == "p"; }).size(), 2u);
}

TEST(Json, SerpRecordRoundTrip) {
  SerpRecord r = ParseSerp(Page("", Block("https://a.com/1", "A") + Block("https://b.org/", "B")));
  r.query_text = "q";
  r.wave_id = "w";
  r.step_index = 3;
  const SerpRecord back = Json(r).get<SerpRecord>();
  EXPECT_EQ(back.results.size(), 2u);
  EXPECT_EQ(back.results[1].domain, "b.org");
  EXPECT_EQ(back.estimated_total_results, r.estimated_total_results);
  EXPECT_EQ(DumpLine(Json(back)), DumpLine(Json(r)));
}

}  // namespace
}  // namespace voidscope
