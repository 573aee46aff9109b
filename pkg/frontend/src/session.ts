/** DOM-free controller for one labeling session.
 *
 * The page layer delegates every action here, so this module is the whole
 * behavior of the UI: starting a session, submitting the pending label,
 * recovering from a 409 when someone else labeled the same query first, and
 * exporting the label log.
 */

import {
  ApiError,
  CreateSessionOptions,
  LabelValue,
  Progress,
  QueryPayload,
  SessionHandle,
  TriageApi,
} from "./api.js";
import { LabelEntry, buildCsv } from "./csv.js";

/** Keyboard shortcuts; the page binds these to the same label() call the
 * buttons use. */
export const KEY_LABELS: Record<string, LabelValue> = {
  a: "actionable",
  u: "unactionable",
};

export interface LabelOutcome {
  /** false when the service answered 409 (someone else labeled the pending
   * query first, or the session stopped); the submission was discarded. */
  accepted: boolean;
  progress: Progress | null;
}

export class SessionFlow {
  session: SessionHandle | null = null;
  current: QueryPayload | null = null;
  progress: Progress | null = null;
  finished = false;
  readonly labeled: LabelEntry[] = [];
  private inFlight = false;

  constructor(private readonly api: TriageApi) {}

  async start(opts: CreateSessionOptions): Promise<void> {
    this.session = await this.api.createSession(opts);
    this.labeled.length = 0;
    this.finished = false;
    await this.advance();
  }

  /** Resume an existing session (e.g. after a page reload). */
  async attach(sessionId: string): Promise<void> {
    this.session = await this.api.getSession(sessionId);
    this.labeled.length = 0;
    this.finished = this.session.status === "stopped";
    if (!this.finished) await this.advance();
  }

  private requireSession(): SessionHandle {
    if (this.session === null) throw new Error("no active session");
    return this.session;
  }

  private async advance(): Promise<void> {
    const session = this.requireSession();
    try {
      this.current = await this.api.nextQuery(session.session_id);
      this.progress = this.current.progress;
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        // stopped or exhausted: nothing more to ask
        this.current = null;
        this.finished = true;
        return;
      }
      throw err;
    }
  }

  async label(value: LabelValue): Promise<LabelOutcome> {
    const session = this.requireSession();
    if (this.inFlight) throw new Error("a label submission is already in flight");
    const pending = this.current;
    if (pending === null) throw new Error("no pending query to label");
    this.inFlight = true;
    try {
      const progress = await this.api.submitLabel(session.session_id, pending.id, value);
      this.labeled.push({ id: pending.id, label: value });
      this.progress = progress;
      if (progress.stopped) {
        this.current = null;
        this.finished = true;
      } else {
        await this.advance();
      }
      return { accepted: true, progress };
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        // the pending query moved under us; drop the stale submission and
        // pick up the service's current one
        await this.advance();
        return { accepted: false, progress: this.progress };
      }
      throw err;
    } finally {
      this.inFlight = false;
    }
  }

  async refreshProgress(): Promise<Progress> {
    const session = this.requireSession();
    const progress = await this.api.progress(session.session_id);
    this.progress = progress;
    return progress;
  }

  buildCsv(): string {
    return buildCsv(this.labeled);
  }

  async stopAndExport(): Promise<string> {
    const session = this.requireSession();
    await this.api.stop(session.session_id);
    this.finished = true;
    this.current = null;
    return this.api.exportCsv(session.session_id);
  }
}
