import { describe, expect, it } from "vitest";

import { CLS, SEP, buildPairInput, buildQuestionInput, tokenize } from "../src/tokenizer";

describe("pair input", () => {
  it("lays out [CLS] question [SEP] candidate [SEP]", () => {
    const tokens = buildPairInput(
      "In what year is Home equity greater than 13000?",
      "Annuities The following table presents the results of operations",
    );
    expect(tokens[0]).toBe(CLS);
    const seps = tokens.filter((t) => t === SEP).length;
    expect(seps).toBe(2);
    expect(tokens[tokens.length - 1]).toBe(SEP);
    const firstSep = tokens.indexOf(SEP);
    expect(tokens.slice(1, firstSep)).toEqual(
      tokenize("In what year is Home equity greater than 13000?"),
    );
  });

  it("truncates from the candidate side, question preserved whole", () => {
    const question = "what is the average of revenue in 2018 and 2019?";
    const long = Array.from({ length: 500 }, (_, i) => `tok${i}`).join(" ");
    const tokens = buildPairInput(question, long, 64);
    expect(tokens.length).toBeLessThanOrEqual(64);
    const firstSep = tokens.indexOf(SEP);
    expect(tokens.slice(1, firstSep)).toEqual(tokenize(question));
    expect(tokens[tokens.length - 1]).toBe(SEP);
  });

  it("rejects empty strings", () => {
    expect(() => buildPairInput("", "candidate")).toThrow(/question/);
    expect(() => buildPairInput("question", "  ")).toThrow(/candidate/);
  });
});

describe("question input", () => {
  it("wraps the question alone", () => {
    const tokens = buildQuestionInput("What was the change in revenue?");
    expect(tokens[0]).toBe(CLS);
    expect(tokens[tokens.length - 1]).toBe(SEP);
    expect(tokens).toHaveLength(2 + tokenize("What was the change in revenue?").length);
  });
});
