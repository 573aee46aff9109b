/** Page wiring. All behavior lives in SessionFlow; this file only moves
 * values between the DOM and the controller. */

import { LabelValue, TriageApi } from "./api.js";
import { KEY_LABELS, SessionFlow } from "./session.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (el === null) throw new Error(`missing element #${id}`);
  return el as T;
};

const api = new TriageApi($<HTMLInputElement>("base-url").value.replace(/\/$/, ""));
const flow = new SessionFlow(api);

const datasetSelect = $<HTMLSelectElement>("dataset");
const seedInput = $<HTMLInputElement>("seed");
const startButton = $<HTMLButtonElement>("start");
const actionableButton = $<HTMLButtonElement>("mark-actionable");
const unactionableButton = $<HTMLButtonElement>("mark-unactionable");
const exportButton = $<HTMLButtonElement>("stop-export");
const statusLine = $<HTMLElement>("status");
const phaseBadge = $<HTMLElement>("phase");
const probabilityBadge = $<HTMLElement>("probability");
const warningTitle = $<HTMLElement>("warning-id");
const featureTable = $<HTMLTableSectionElement>("features");
const progressFill = $<HTMLElement>("progress-fill");
const progressText = $<HTMLElement>("progress-text");

function setBusy(busy: boolean): void {
  actionableButton.disabled = busy || flow.current === null;
  unactionableButton.disabled = busy || flow.current === null;
  exportButton.disabled = flow.session === null;
}

function render(): void {
  const progress = flow.progress;
  if (progress !== null) {
    const pct = progress.pool === 0 ? 0 : (100 * progress.labeled) / progress.pool;
    progressFill.style.width = `${pct.toFixed(1)}%`;
    progressText.textContent =
      `${progress.labeled} labeled / ${progress.pool} total, ` +
      `${progress.positives} actionable found`;
    phaseBadge.textContent = progress.phase.replace("_", " ");
  }
  const query = flow.current;
  featureTable.replaceChildren();
  if (query === null) {
    warningTitle.textContent = flow.finished ? "session finished" : "no query";
    probabilityBadge.textContent = "";
  } else {
    warningTitle.textContent = query.id;
    probabilityBadge.textContent =
      query.probability === null ? "no model yet" : `P(actionable) ${query.probability.toFixed(3)}`;
    for (const [name, value] of Object.entries(query.features)) {
      const row = featureTable.insertRow();
      row.insertCell().textContent = name;
      row.insertCell().textContent = value;
    }
  }
  setBusy(false);
}

function report(err: unknown): void {
  statusLine.textContent = err instanceof Error ? err.message : String(err);
}

async function start(): Promise<void> {
  setBusy(true);
  statusLine.textContent = "starting session...";
  try {
    await flow.start({
      dataset: datasetSelect.value,
      seed: Number.parseInt(seedInput.value, 10) || 0,
    });
    statusLine.textContent = `session ${flow.session?.session_id ?? ""}`;
  } catch (err) {
    report(err);
  }
  render();
}

async function submit(value: LabelValue): Promise<void> {
  if (flow.current === null) return;
  setBusy(true);
  try {
    const outcome = await flow.label(value);
    statusLine.textContent = outcome.accepted
      ? `labeled ${value}`
      : "query was taken by another reviewer; showing the next one";
  } catch (err) {
    report(err);
  }
  render();
}

async function stopAndExport(): Promise<void> {
  setBusy(true);
  try {
    const csv = await flow.stopAndExport();
    const blob = new Blob([csv], { type: "text/csv" });
    const link = document.createElement("a");
    link.href = URL.createObjectURL(blob);
    link.download = `${flow.session?.dataset ?? "session"}-labels.csv`;
    link.click();
    URL.revokeObjectURL(link.href);
    statusLine.textContent = `exported ${flow.labeled.length} labels`;
  } catch (err) {
    report(err);
  }
  render();
}

startButton.addEventListener("click", () => void start());
actionableButton.addEventListener("click", () => void submit("actionable"));
unactionableButton.addEventListener("click", () => void submit("unactionable"));
exportButton.addEventListener("click", () => void stopAndExport());
document.addEventListener("keydown", (event) => {
  const label = KEY_LABELS[event.key];
  if (label !== undefined && !actionableButton.disabled) void submit(label);
});

void (async () => {
  try {
    for (const name of await api.listDatasets()) {
      const option = document.createElement("option");
      option.value = name;
      option.textContent = name;
      datasetSelect.append(option);
    }
    statusLine.textContent = "pick a dataset and start";
  } catch (err) {
    report(err);
  }
})();
