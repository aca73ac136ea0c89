import { describe, expect, it } from "vitest";

import { fmt, fmtQuantity, m2ToMilliDarcy, paToBar, pasToCp, provenanceLabel, secondsToDays, shortValue } from "../src/format.js";

describe("unit conversions", () => {
  it("pressure to bar", () => {
    expect(paToBar(1.5e7)).toBeCloseTo(150, 10);
  });

  it("viscosity to cP", () => {
    expect(pasToCp(5e-4)).toBeCloseTo(0.5, 12);
  });

  it("permeability to mD", () => {
    expect(m2ToMilliDarcy(9.869233e-13)).toBeCloseTo(1000, 6);
    expect(m2ToMilliDarcy(9.869233e-16)).toBeCloseTo(1, 9);
  });

  it("time to days", () => {
    expect(secondsToDays(86_400)).toBe(1);
  });
});

describe("fmtQuantity", () => {
  it("formats with display units", () => {
    expect(fmtQuantity(1.5e7, "pressure")).toBe("150 bar");
    expect(fmtQuantity(5e-3, "viscosity")).toBe("5 cP");
  });

  it("falls back to plain formatting", () => {
    expect(fmtQuantity(0.25, "saturation")).toBe("0.25");
  });
});

describe("fmt", () => {
  it("keeps mid-range numbers plain", () => {
    expect(fmt(150)).toBe("150");
    expect(fmt(0.828, 3)).toBe("0.828");
  });

  it("switches to exponent for extremes", () => {
    expect(fmt(1.23e-7)).toContain("e-7");
    expect(fmt(3.1536e8)).toContain("e+8");
  });
});

describe("labels", () => {
  it("provenance labels", () => {
    expect(provenanceLabel("user_explicit")).toBe("User explicit");
    expect(provenanceLabel("simulator_default")).toContain("tacit");
  });

  it("shortValue truncates", () => {
    const value = { a: "x".repeat(300) };
    expect(shortValue(value, 50).length).toBeLessThanOrEqual(50);
  });
});
