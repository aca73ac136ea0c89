/** Display-unit conversion (the API speaks SI only). */

const BAR = 1.0e5;
const CENTIPOISE = 1.0e-3;
const DARCY = 9.869233e-13;
const MILLIDARCY = 1.0e-3 * DARCY;
const DAY = 86_400;

export function paToBar(pa: number): number {
  return pa / BAR;
}

export function pasToCp(pas: number): number {
  return pas / CENTIPOISE;
}

export function m2ToMilliDarcy(m2: number): number {
  return m2 / MILLIDARCY;
}

export function secondsToDays(s: number): number {
  return s / DAY;
}

export function fmt(x: number, digits = 3): string {
  if (!Number.isFinite(x)) return String(x);
  if (x === 0) return "0";
  const ax = Math.abs(x);
  if (ax >= 1e5 || ax < 1e-3) return x.toExponential(digits - 1);
  return String(parseFloat(x.toPrecision(digits)));
}

const KIND_FORMATTERS: Record<string, (si: number) => string> = {
  pressure: (si) => `${fmt(paToBar(si))} bar`,
  viscosity: (si) => `${fmt(pasToCp(si))} cP`,
  permeability: (si) => `${fmt(m2ToMilliDarcy(si))} mD`,
  time: (si) => `${fmt(secondsToDays(si))} d`,
  rate: (si) => `${fmt(si * DAY)} m3/d`,
};

export function fmtQuantity(si: number, kind: string): string {
  const f = KIND_FORMATTERS[kind];
  return f ? f(si) : fmt(si);
}

export function provenanceLabel(provenance: string): string {
  switch (provenance) {
    case "user_explicit":
      return "User explicit";
    case "agent_default":
      return "Agent default";
    case "simulator_default":
      return "Simulator default (tacit)";
    default:
      return provenance;
  }
}

/** Compact JSON for ledger values and proposed defaults. */
export function shortValue(value: unknown, max = 100): string {
  const text = JSON.stringify(value);
  if (text === undefined) return "";
  return text.length > max ? text.slice(0, max - 1) + "…" : text;
}
